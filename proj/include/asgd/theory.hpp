#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "asgd/objective.hpp"
#include "asgd/schedule.hpp"

namespace asgd {

struct SparsityStats {
  std::uint32_t delta_bar = 0;  // max support size
  double mean_support = 0.0;    // E|D_xi|
  double delta_bar_D = 0.0;     // D * E[ceil(|D_xi|/D)]
  double collision = 0.0;       // max_j Prob(j in D_xi)
};

SparsityStats sparsity_stats(const Problem& p, int D);
SparsityStats sparsity_stats(const Dataset& d, int D);

// T from the sublinear SGD theorem:
// (4L/mu) max{L mu |w0-w*|^2 / N, 1} - 4L/mu.
double sgd_threshold_T(double mu, double L, double N, double w0_dist_sq);

// 4 alpha^2 N / mu^2 * 1/(t - T + E) with alpha = 2, E = 4L/mu; clamped to
// its t = T value below T.
double theorem2_bound(double t, double mu, double L, double N,
                      double w0_dist_sq);

// Leading term 4 alpha^2 D N / mu^2 * t / (t + E - 1)^2. The log remainder
// is a fit envelope, never asserted: remainder_c * ln t / (t + E - 1)^2.
double hogwild_bound(double t, double alpha, double mu, double N, int D,
                     double E, double remainder_c = 0.0);

// T0 = exp[2 sqrt(collision) (1 + (L+mu) alpha / mu)],
// T1 = mu^2 |w0-w*|^2 / (alpha^2 N D).
struct Thresholds {
  double T0;
  double T1;
};
Thresholds thresholds(double alpha, double mu, double L, double N, int D,
                      double collision, double w0_dist_sq);

// Adaptive Simpson with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 60);

double M_of_t(const StepSchedule& s, double t);

// C(t) = exp(-M(t)) int_0^t exp(M(x)) n(x)^2 dx, accumulated in log space
// as int exp(M(x)-M(t)) n(x)^2 dx so exp(M) never overflows.
double C_of_t(const StepSchedule& s, double t, double abs_tol = 1e-9);

// Number of sign changes of C(t) - n(t) on a log grid over [t_lo, t_hi].
int count_crossovers(const StepSchedule& s, double t_lo, double t_hi,
                     int grid_points = 200);

struct ScheduleRaceRow {
  double t;
  std::vector<double> C;  // one per schedule
  std::size_t winner;     // argmin C
};
std::vector<ScheduleRaceRow> schedule_race(
    const std::vector<StepSchedule>& schedules, const std::vector<double>& ts);

inline double expected_coord_updates(double delta_bar_D, int D, double t) {
  return t * delta_bar_D / D;
}

}  // namespace asgd
