// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failing criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "asgd/engine_hogwild.hpp"
#include "asgd/engine_seq.hpp"
#include "asgd/harness.hpp"
#include "asgd/synthetic.hpp"
#include "asgd/theory.hpp"

using namespace asgd;

namespace {

int failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %2d [%s]: %s%s%s\n", idx, name,
              ok ? "PASS" : "FAIL", detail.empty() ? "" : " — ",
              detail.c_str());
  if (!ok) ++failures;
}

std::vector<double> random_w(std::mt19937_64& g, std::size_t dim,
                             double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  std::vector<double> w(dim);
  for (double& x : w) x = gauss(g);
  return w;
}

// ---------------------------------------------------------------- 1
bool partition_laws(std::string& detail) {
  std::mt19937_64 g(101);
  for (int rep = 0; rep < 1000; ++rep) {
    int size = 1 + static_cast<int>(uniform_index(g, 200));
    std::set<std::uint32_t> s;
    while (static_cast<int>(s.size()) < size)
      s.insert(static_cast<std::uint32_t>(uniform_index(g, 100000)));
    std::vector<std::uint32_t> sup(s.begin(), s.end());
    for (int D = 1; D <= 16; ++D) {
      FilterPartition p = build_partition(sup, D);
      if (p.d != static_cast<int>(std::min<std::size_t>(D, sup.size()))) {
        detail = "d != min(D, |support|)";
        return false;
      }
      std::size_t mn = sup.size(), mx = 0;
      std::vector<std::uint32_t> covered;
      for (int u = 0; u < p.d; ++u) {
        auto sl = p.set(u);
        if (sl.empty()) {
          detail = "empty set";
          return false;
        }
        mn = std::min(mn, sl.size());
        mx = std::max(mx, sl.size());
        covered.insert(covered.end(), sl.begin(), sl.end());
      }
      if (mx - mn > 1) {
        detail = "size spread > 1";
        return false;
      }
      std::sort(covered.begin(), covered.end());
      if (covered != sup) {
        detail = "sets are not a partition of the support";
        return false;
      }
      if (!verify_unbiased(p)) {
        detail = "unbiasedness enumeration failed";
        return false;
      }
    }
  }
  detail = "1000 supports x D in 1..16";
  return true;
}

// ---------------------------------------------------------------- 2
bool gradient_fd(std::string& detail) {
  auto data = std::make_shared<Dataset>(parse_sparse_text(std::string(
      "+1 1:0.5 3:2.0\n-1 2:1.0 3:-0.5\n+1 1:-1.5\n-1 1:0.25 2:0.75")));
  std::mt19937_64 g(7);
  double worst = 0.0;
  for (LossKind kind : {LossKind::logistic, LossKind::least_squares}) {
    Objective obj(kind, data, 0.3);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> w = random_w(g, obj.dim());
      std::size_t i = rep % obj.size();
      std::vector<double> grad;
      obj.component_grad(w, i, grad);
      for (std::size_t j = 0; j < obj.dim(); ++j) {
        std::vector<double> wp = w, wm = w;
        wp[j] += 1e-6;
        wm[j] -= 1e-6;
        double fd =
            (obj.component_loss(wp, i) - obj.component_loss(wm, i)) / 2e-6;
        double rel = std::abs(grad[j] - fd) / (1.0 + std::abs(grad[j]));
        worst = std::max(worst, rel);
      }
    }
  }
  std::ostringstream os;
  os << "max relative error " << worst;
  detail = os.str();
  return worst <= 1e-5;
}

// ---------------------------------------------------------------- 3
bool second_moment(std::string& detail) {
  SyntheticProblem sp = make_synthetic_logistic(8, 200, 0.8, 11);
  const Problem& p = *sp.problem;
  double L = sp.constants.L, N = sp.constants.N,
         kappa = sp.constants.kappa, f_star = *sp.constants.f_star;
  std::mt19937_64 g(13);
  double worst_margin = -1e300;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> w = random_w(g, p.dim(), 2.0);
    double sm = 0;
    std::vector<double> grad;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p.component_grad(w, i, grad);
      for (double x : grad) sm += x * x;
    }
    sm /= p.size();
    double gap = full_objective(p, w) - f_star;
    double margin = sm - (4.0 * L * gap + N);
    double margin_k = sm - (4.0 * L * kappa * gap + N);
    worst_margin = std::max(worst_margin, std::max(margin, margin_k));
    if (margin > 1e-9 || margin_k > 1e-9) {
      detail = "bound violated";
      return false;
    }
  }
  std::ostringstream os;
  os << "worst slack " << worst_margin << " over 1000 points";
  detail = os.str();
  return true;
}

// ---------------------------------------------------------------- 4
bool theorem2_desk(std::string& detail) {
  SyntheticProblem sp =
      make_separable_least_squares(10, 1.0 / std::sqrt(2.0), 1.0, 1.0);
  // exact constants: mu = 0.1, L = 1, N = 2, w* = 1, T = 0
  double mu = sp.constants.mu, L = sp.constants.L, N = sp.constants.N;
  double w0d = 10.0;
  StepSchedule sched = StepSchedule::theorem_sgd(mu, L);
  const std::uint64_t T = 100000;
  const int seeds = 100;
  std::vector<double> sum;
  std::vector<std::uint64_t> ts;
  for (int s = 1; s <= seeds; ++s) {
    SeqRunOptions o;
    o.mode = SeqMode::sgd;
    o.T = T;
    o.record_every = 1000;
    o.seed = static_cast<std::uint64_t>(s);
    o.w_star = &*sp.constants.w_star;
    Trace tr = run_seq(*sp.problem, sched, o);
    if (sum.empty()) {
      sum.assign(tr.rows.size(), 0.0);
      for (const TraceRow& r : tr.rows) ts.push_back(r.t);
    }
    for (std::size_t i = 0; i < tr.rows.size(); ++i)
      sum[i] += tr.rows[i].dist_sq;
  }
  int violations = 0;
  double Tthr = sgd_threshold_T(mu, L, N, w0d);
  int checked = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double t = static_cast<double>(ts[i]);
    if (t < Tthr) continue;
    ++checked;
    double mean = sum[i] / seeds;
    if (mean > theorem2_bound(t, mu, L, N, w0d)) ++violations;
  }
  std::ostringstream os;
  os << violations << " violations over " << checked
     << " recorded points (2 allowed), T_threshold = " << Tthr;
  detail = os.str();
  return checked >= 100 && violations <= 2;
}

// ---------------------------------------------------------------- 5
bool batch_variance(std::string& detail) {
  SyntheticProblem sp = make_synthetic_logistic(8, 200, 0.8, 11);
  const Problem& p = *sp.problem;
  const std::vector<double>& ws = *sp.constants.w_star;
  double N = sp.constants.N;
  std::mt19937_64 g(29);
  std::ostringstream os;
  bool ok = true;
  for (std::size_t k : {1u, 2u, 5u, 10u}) {
    const int draws = 100000;
    double mean = 0, m2 = 0;
    std::vector<std::size_t> batch(k);
    std::vector<double> grad;
    for (int r = 0; r < draws; ++r) {
      for (std::size_t b = 0; b < k; ++b)
        batch[b] = uniform_index(g, p.size());
      batch_grad(p, ws, batch, grad);
      double sq = 0;
      for (double x : grad) sq += x * x;
      double delta = sq - mean;
      mean += delta / (r + 1);
      m2 += delta * (sq - mean);
    }
    double se = std::sqrt(m2 / (draws - 1.0) / draws);
    double target = N / (2.0 * k);
    double z = std::abs(mean - target) / se;
    os << "k=" << k << " z=" << std::round(z * 100) / 100 << "  ";
    if (z > 3.0) ok = false;
  }
  detail = os.str() + "(|z| <= 3 required)";
  return ok;
}

// ---------------------------------------------------------------- 6
bool delay_robustness(std::string& detail) {
  SyntheticProblem sp = make_synthetic_logistic(10, 1000, 0.5, 5);
  double mu = sp.constants.mu, L = sp.constants.L;
  const std::uint64_t T = 50 * 1000;  // 50 epochs
  auto mean_series = [&](std::uint64_t tau, std::vector<double>& dist,
                         std::vector<std::uint64_t>& ts) {
    double final_loss = 0;
    for (int s = 1; s <= 10; ++s) {
      StepSchedule sched = StepSchedule::hogwild(
          mu, L, 1, static_cast<double>(tau));
      DelaySimOptions o;
      o.D = 1;
      o.tau = tau;
      o.T = T;
      o.record_every = 1000;
      o.seed = static_cast<std::uint64_t>(s);
      o.w_star = &*sp.constants.w_star;
      Trace tr = run_delay_sim(*sp.problem, sched, o);
      if (dist.empty()) {
        dist.assign(tr.rows.size(), 0.0);
        for (const TraceRow& r : tr.rows) ts.push_back(r.t);
      }
      for (std::size_t i = 0; i < tr.rows.size(); ++i)
        dist[i] += tr.rows[i].dist_sq / 10.0;
      final_loss += tr.rows.back().loss / 10.0;
    }
    return final_loss;
  };

  std::vector<double> d0;
  std::vector<std::uint64_t> ts;
  double base = mean_series(0, d0, ts);
  double gap0 = base - *sp.constants.f_star;
  bool ok = true;
  std::ostringstream os;
  os << "final loss gap tau=0: " << gap0 << "; ";
  for (std::uint64_t tau : {1ull, 10ull, 100ull}) {
    std::vector<double> d;
    std::vector<std::uint64_t> t2;
    double l = mean_series(tau, d, t2);
    double ratio = (l - *sp.constants.f_star) / gap0;
    os << "tau=" << tau << " ratio " << std::round(ratio * 1000) / 1000 << "; ";
    if (ratio > 1.5 || ratio < 1.0 / 1.5) ok = false;
  }
  // log-log slope of the mean dist over the final decade, tau = 10
  std::vector<double> d10;
  std::vector<std::uint64_t> t10;
  mean_series(10, d10, t10);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t10.size(); ++i) {
    if (t10[i] < T / 10 || d10[i] <= 0) continue;
    double x = std::log(static_cast<double>(t10[i])), y = std::log(d10[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  os << "slope " << std::round(slope * 1000) / 1000;
  detail = os.str();
  if (slope < -1.3 || slope > -0.7) ok = false;
  return ok;
}

// ---------------------------------------------------------------- 7
bool reduction_chain(std::string& detail) {
  SyntheticProblem sp = make_synthetic_logistic(6, 50, 0.7, 4);
  StepSchedule sched =
      StepSchedule::theorem_sgd(sp.constants.mu, sp.constants.L);
  SeqRunOptions a;
  a.mode = SeqMode::sgd;
  a.T = 2000;
  a.record_every = 100;
  a.seed = 3;
  Trace sgd = run_seq(*sp.problem, sched, a);

  DelaySimOptions d;
  d.D = 1;
  d.tau = 0;
  d.T = a.T;
  d.record_every = a.record_every;
  d.seed = a.seed;
  Trace sim = run_delay_sim(*sp.problem, sched, d);
  for (std::size_t i = 0; i < sgd.rows.size(); ++i)
    if (sgd.rows[i].loss != sim.rows[i].loss ||
        sgd.rows[i].t_prime != sim.rows[i].t_prime) {
      detail = "tau=0 D=1 delay sim differs from sequential SGD";
      return false;
    }

  // mask extremes at tau = 5
  d.tau = 5;
  d.mask.policy = MaskPolicy::all_in;
  Trace all_in = run_delay_sim(*sp.problem, sched, d);
  SeqRunOptions f = a;
  f.mode = SeqMode::filtered;
  f.D = 1;
  Trace filt = run_seq(*sp.problem, sched, f);
  for (std::size_t i = 0; i < filt.rows.size(); ++i)
    if (filt.rows[i].loss != all_in.rows[i].loss) {
      detail = "all_in mask does not read w_t exactly";
      return false;
    }

  // none_in: shadow maintaining explicit history
  auto data = std::make_shared<Dataset>(
      parse_sparse_text(std::string("1 1:1.0\n3 1:1.0\n-2 1:1.0")));
  Objective obj(LossKind::least_squares, data, 0.0);
  StepSchedule cs = StepSchedule::constant(0.05, 0.05);
  const std::uint64_t tau = 5, T = 300;
  DelaySimOptions nd;
  nd.tau = tau;
  nd.mask.policy = MaskPolicy::none_in;
  nd.T = T;
  nd.record_every = 1;
  nd.seed = 23;
  Trace sim2 = run_delay_sim(obj, cs, nd);
  RngBundle rng(23);
  std::vector<std::vector<double>> hist{{0.0}};
  std::vector<double> cur{0.0};
  for (std::uint64_t t = 0; t < T; ++t) {
    const std::vector<double>& what = hist[t >= tau ? t - tau : 0];
    std::size_t i = uniform_index(rng.example, obj.size());
    SparseVec grad;
    obj.component_grad_support(what, i, grad);
    cur[0] += -(cs.eta(t) * 1 * grad.val[0]);
    hist.push_back(cur);
    if (sim2.rows[t + 1].loss != full_objective(obj, cur)) {
      detail = "none_in mask does not read w_{t-tau} exactly";
      return false;
    }
  }
  detail = "bit-exact reduction and mask extremes";
  return true;
}

// ---------------------------------------------------------------- 8
bool parallel_atomicity(std::string& detail) {
  // integer-valued deltas keep double arithmetic exact, so the final cells
  // must equal the per-cell delta totals with zero tolerance
  SharedModel m(64);
  const int workers = 8;
  const std::uint64_t updates = 1000000;
  std::vector<std::vector<double>> per_worker(workers,
                                              std::vector<double>(64, 0.0));
#pragma omp parallel num_threads(workers)
  {
#ifdef _OPENMP
    int w = omp_get_thread_num();
#else
    int w = 0;
#endif
    std::mt19937_64 g(1000 + w);
    for (std::uint64_t i = 0; i < updates / workers; ++i) {
      std::size_t cell = uniform_index(g, 64);
      double delta = static_cast<double>(1 + uniform_index(g, 8)) *
                     (uniform_index(g, 2) ? 1.0 : -1.0);
      m.add(cell, delta);
      per_worker[w][cell] += delta;
    }
  }
  for (std::size_t c = 0; c < 64; ++c) {
    double expect = 0;
    for (int w = 0; w < workers; ++w) expect += per_worker[w][c];
    if (m.load(c) != expect) {
      detail = "lost update detected";
      return false;
    }
  }
  detail = "8 workers, 10^6 updates, 64 cells, exact";
  return true;
}

// ---------------------------------------------------------------- 9
bool fastest_schedule(std::string& detail) {
  StepSchedule q1 = StepSchedule::power(1.0, 2.0, 1.0);
  StepSchedule q05 = StepSchedule::power(0.5, 4.0, 1.0);
  StepSchedule q075 = StepSchedule::power(0.75, std::pow(2.0, 4.0 / 3.0), 1.0);
  double c1 = C_of_t(q1, 1e5), c05 = C_of_t(q05, 1e5), c075 = C_of_t(q075, 1e5);
  bool ok = c1 < c05 && c1 < c075;

  StepSchedule two = StepSchedule::power(1.0, 2.0, 1.0, 2.0);  // n = 2/(t+2)
  double ratio = C_of_t(two, 1e6) / two.n_of(1e6);
  ok = ok && ratio >= 1.9 && ratio <= 2.1;

  int x1 = count_crossovers(q1, 1.0, 1e6, 120);
  int x05 = count_crossovers(q05, 1.0, 1e6, 120);
  int x075 = count_crossovers(q075, 1.0, 1e6, 120);
  ok = ok && x1 == 1 && x05 == 1 && x075 == 1;

  std::ostringstream os;
  os << "C1=" << c1 << " C0.75=" << c075 << " C0.5=" << c05
     << "; C/n(1e6)=" << ratio << "; crossovers " << x1 << "," << x075 << ","
     << x05;
  detail = os.str();
  return ok;
}

// ---------------------------------------------------------------- 10
bool sparsity_hand(std::string& detail) {
  Dataset d;
  d.dim = 8;
  std::vector<std::vector<std::uint32_t>> sups{
      {0, 1, 2}, {1, 3}, {2, 3, 4, 5}, {6}, {0, 6, 7}, {1, 2}};
  for (auto& s : sups) {
    Example e;
    e.label = 1.0;
    e.indices = s;
    e.values.assign(s.size(), 1.0);
    d.examples.push_back(e);
  }
  for (int D : {1, 2, 3}) {
    SparsityStats st = sparsity_stats(d, D);
    std::size_t mx = 0;
    double sumceil = 0, sum = 0;
    std::vector<int> cnt(8, 0);
    for (auto& s : sups) {
      mx = std::max(mx, s.size());
      sum += s.size();
      sumceil += (s.size() + D - 1) / D;
      for (auto j : s) ++cnt[j];
    }
    double brute_dbd = D * sumceil / 6.0;
    double brute_delta = *std::max_element(cnt.begin(), cnt.end()) / 6.0;
    if (st.delta_bar != mx || st.delta_bar_D != brute_dbd ||
        st.collision != brute_delta) {
      detail = "mismatch vs brute force";
      return false;
    }
    if (st.delta_bar_D > sum / 6.0 + D - 1 + 1e-12) {
      detail = "delta_bar_D inequality violated";
      return false;
    }
  }
  detail = "exact match for D in {1,2,3}";
  return true;
}

// ---------------------------------------------------------------- 11
bool reproducibility(std::string& detail) {
  RunConfig cfg = RunConfig::from_text(
      "synthetic=logistic\nsynthetic_dim=6\nsynthetic_n=60\nschedule=hogwild\n"
      "engine=delay_sim\ntau=7\nD=2\nT=1500\nseeds=1,2,3\nrecord_every=300\n"
      "bound=hogwild_theorem4\n");
  auto render = [&] {
    AggregateResult agg = run_config(cfg);
    std::ostringstream os;
    emit_csv(agg, cfg, os);
    std::istringstream in(os.str());
    std::string line, out;
    while (std::getline(in, line))
      if (line.rfind("# wall_seconds", 0) != 0) out += line + "\n";
    return out;
  };
  std::string a = render(), b = render();
  detail = "byte-identical csv (wall time excluded)";
  if (a != b) detail = "csv differs between identical runs";
  return a == b;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  auto timed = [&](int idx, const char* name, auto&& fn) {
    auto t0 = clock::now();
    std::string detail;
    bool ok = fn(detail);
    double sec = std::chrono::duration<double>(clock::now() - t0).count();
    std::ostringstream os;
    os << detail << " [" << std::round(sec * 100) / 100 << "s]";
    report(idx, name, ok, os.str());
  };
  timed(1, "partition laws", partition_laws);
  timed(2, "gradient finite differences", gradient_fd);
  timed(3, "second-moment lemma", second_moment);
  timed(4, "sublinear SGD bound", theorem2_desk);
  timed(5, "batch variance law", batch_variance);
  timed(6, "delay robustness", delay_robustness);
  timed(7, "reduction chain", reduction_chain);
  timed(8, "parallel atomicity", parallel_atomicity);
  timed(9, "fastest schedule", fastest_schedule);
  timed(10, "sparsity statistics", sparsity_hand);
  timed(11, "reproducibility", reproducibility);
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  else std::printf("all 11 criteria passed\n");
  return failures;
}
