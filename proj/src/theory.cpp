#include "asgd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asgd {

SparsityStats sparsity_stats(const Dataset& d, int D) {
  if (D < 1) throw std::invalid_argument("D must be positive");
  SparsityStats st;
  std::vector<std::size_t> coord_count(d.dim, 0);
  double sum_support = 0.0, sum_ceil = 0.0;
  for (const Example& e : d.examples) {
    std::size_t m = e.indices.size();
    st.delta_bar = std::max<std::uint32_t>(st.delta_bar, m);
    sum_support += static_cast<double>(m);
    sum_ceil += static_cast<double>((m + D - 1) / D);
    for (std::uint32_t j : e.indices) ++coord_count[j];
  }
  double n = static_cast<double>(d.n());
  st.mean_support = sum_support / n;
  st.delta_bar_D = D * sum_ceil / n;
  std::size_t max_count = 0;
  for (std::size_t c : coord_count) max_count = std::max(max_count, c);
  st.collision = static_cast<double>(max_count) / n;
  return st;
}

SparsityStats sparsity_stats(const Problem& p, int D) {
  if (D < 1) throw std::invalid_argument("D must be positive");
  SparsityStats st;
  std::vector<std::size_t> coord_count(p.dim(), 0);
  double sum_support = 0.0, sum_ceil = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& sup = p.support(i);
    std::size_t m = sup.size();
    st.delta_bar = std::max<std::uint32_t>(st.delta_bar, m);
    sum_support += static_cast<double>(m);
    sum_ceil += static_cast<double>((m + D - 1) / D);
    for (std::uint32_t j : sup) ++coord_count[j];
  }
  double n = static_cast<double>(p.size());
  st.mean_support = sum_support / n;
  st.delta_bar_D = D * sum_ceil / n;
  std::size_t max_count = 0;
  for (std::size_t c : coord_count) max_count = std::max(max_count, c);
  st.collision = static_cast<double>(max_count) / n;
  return st;
}

double sgd_threshold_T(double mu, double L, double N, double w0_dist_sq) {
  if (N <= 0) throw std::invalid_argument("threshold needs N > 0");
  double c = 4.0 * L / mu;
  return c * std::max(L * mu * w0_dist_sq / N, 1.0) - c;
}

double theorem2_bound(double t, double mu, double L, double N,
                      double w0_dist_sq) {
  constexpr double alpha = 2.0;
  double E = 2.0 * alpha * L / mu;
  double T = sgd_threshold_T(mu, L, N, w0_dist_sq);
  double tt = std::max(t, T);  // clamp below T
  return 4.0 * alpha * alpha * N / (mu * mu) / (tt - T + E);
}

double hogwild_bound(double t, double alpha, double mu, double N, int D,
                     double E, double remainder_c) {
  double denom = (t + E - 1.0) * (t + E - 1.0);
  double lead = 4.0 * alpha * alpha * D * N / (mu * mu) * t / denom;
  if (remainder_c != 0.0 && t > 1.0) lead += remainder_c * std::log(t) / denom;
  return lead;
}

Thresholds thresholds(double alpha, double mu, double L, double N, int D,
                      double collision, double w0_dist_sq) {
  double t0 =
      std::exp(2.0 * std::sqrt(collision) * (1.0 + (L + mu) * alpha / mu));
  double t1 = mu * mu / (alpha * alpha * N * D) * w0_dist_sq;
  return {t0, t1};
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa,
             double b, double fb, double fm, double whole, double tol,
             int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, fa, m, fm, flm);
  double right = simpson(f, m, fm, b, fb, frm);
  double err = left + right - whole;
  if (depth <= 0) {
    if (std::abs(err) > 15.0 * tol)
      throw std::runtime_error("quadrature did not converge");
    return left + right + err / 15.0;
  }
  if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  return adapt(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = simpson(f, a, fa, b, fb, fm);
  return adapt(f, a, fa, b, fb, fm, whole, abs_tol, max_depth);
}

double M_of_t(const StepSchedule& s, double t) { return s.M_of(t); }

double C_of_t(const StepSchedule& s, double t, double abs_tol) {
  if (t <= 0.0) return 0.0;
  double Mt = s.M_of(t);
  auto g = [&](double x) {
    double nx = s.n_of(x);
    return std::exp(s.M_of(x) - Mt) * nx * nx;
  };
  // The integrand concentrates near x = t; split into dyadically shrinking
  // trailing segments so the adaptive rule sees the spike.
  std::vector<double> cuts{0.0};
  for (double span = t / 2.0; span > 1.0; span /= 2.0) cuts.push_back(t - span);
  cuts.push_back(t);
  double sum = 0.0;
  double per = abs_tol / static_cast<double>(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    sum += adaptive_simpson(g, cuts[i], cuts[i + 1], per);
  return sum;
}

int count_crossovers(const StepSchedule& s, double t_lo, double t_hi,
                     int grid_points) {
  int changes = 0;
  int prev_sign = 0;
  double lr = std::log(t_lo), hr = std::log(t_hi);
  for (int i = 0; i < grid_points; ++i) {
    double t = std::exp(lr + (hr - lr) * i / (grid_points - 1));
    double diff = C_of_t(s, t) - s.n_of(t);
    int sign = diff > 0 ? 1 : (diff < 0 ? -1 : 0);
    if (sign != 0 && prev_sign != 0 && sign != prev_sign) ++changes;
    if (sign != 0) prev_sign = sign;
  }
  return changes;
}

std::vector<ScheduleRaceRow> schedule_race(
    const std::vector<StepSchedule>& schedules,
    const std::vector<double>& ts) {
  std::vector<ScheduleRaceRow> out;
  for (double t : ts) {
    ScheduleRaceRow row{t, {}, 0};
    for (const auto& s : schedules) row.C.push_back(C_of_t(s, t));
    row.winner = std::min_element(row.C.begin(), row.C.end()) - row.C.begin();
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace asgd
