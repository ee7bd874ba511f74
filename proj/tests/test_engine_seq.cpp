#include <doctest.h>

#include <cmath>
#include <memory>

#include "asgd/engine_seq.hpp"
#include "asgd/synthetic.hpp"

using namespace asgd;

namespace {

std::shared_ptr<Objective> one_dim_quadratic() {
  // f(w) = (w - 2)^2, gradient 2(w - 2), L = 2
  auto data = std::make_shared<Dataset>(parse_sparse_text(std::string("2 1:1.0")));
  return std::make_shared<Objective>(LossKind::least_squares, data, 0.0);
}

bool traces_equal(const Trace& a, const Trace& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].t != b.rows[i].t) return false;
    if (a.rows[i].t_prime != b.rows[i].t_prime) return false;
    if (a.rows[i].loss != b.rows[i].loss) return false;  // bitwise
  }
  return true;
}

}  // namespace

TEST_CASE("one sgd step on the 1-d quadratic") {
  auto obj = one_dim_quadratic();
  StepSchedule sched = StepSchedule::constant(0.25, 0.25);
  RunState s({0.0}, 1);
  sgd_step(s, *obj, sched);
  CHECK(s.w[0] == doctest::Approx(1.0).epsilon(1e-15));  // 0 - 0.25 * (-4)
  CHECK(s.t == 1);
  CHECK(s.coord_updates == 1);
}

TEST_CASE("fixed point: engines leave w* of an interpolation problem") {
  auto obj = one_dim_quadratic();
  StepSchedule sched = StepSchedule::constant(0.25, 0.25);
  PartitionCache parts(*obj, 1);
  RunState s({2.0}, 1);
  sgd_step(s, *obj, sched);
  filtered_step(s, *obj, sched, parts);
  batch_step(s, *obj, sched, 1, 1);
  CHECK(s.w[0] == 2.0);
}

TEST_CASE("identical seeds give bit-identical traces") {
  SyntheticProblem sp = make_synthetic_logistic(5, 40, 0.7, 2);
  StepSchedule sched = StepSchedule::theorem_sgd(sp.constants.mu, sp.constants.L);
  SeqRunOptions o;
  o.mode = SeqMode::sgd;
  o.T = 500;
  o.record_every = 50;
  o.seed = 9;
  CHECK(traces_equal(run_seq(*sp.problem, sched, o),
                     run_seq(*sp.problem, sched, o)));
}

TEST_CASE("D = 1 filtered trajectory equals sgd exactly") {
  SyntheticProblem sp = make_synthetic_logistic(6, 50, 0.7, 4);
  StepSchedule sched = StepSchedule::theorem_sgd(sp.constants.mu, sp.constants.L);
  SeqRunOptions a;
  a.mode = SeqMode::sgd;
  a.T = 1000;
  a.record_every = 100;
  a.seed = 3;
  SeqRunOptions b = a;
  b.mode = SeqMode::filtered;
  b.D = 1;
  CHECK(traces_equal(run_seq(*sp.problem, sched, a),
                     run_seq(*sp.problem, sched, b)));
}

TEST_CASE("batch_step with k = 1 equals filtered_step") {
  auto data = make_sparse_dataset(30, 60, 5, 8);
  Objective obj(LossKind::logistic, data, 1.0 / 60);
  StepSchedule sched = StepSchedule::hogwild(1.0 / 60, estimate_L(obj), 2, 0.0);
  SeqRunOptions a;
  a.mode = SeqMode::filtered;
  a.D = 2;
  a.T = 400;
  a.record_every = 50;
  a.seed = 6;
  SeqRunOptions b = a;
  b.mode = SeqMode::batch;
  b.batch_k = 1;
  CHECK(traces_equal(run_seq(obj, sched, a), run_seq(obj, sched, b)));
}

TEST_CASE("filtered update is unbiased over the filter choices") {
  auto data = make_sparse_dataset(20, 10, 6, 5);
  Objective obj(LossKind::logistic, data, 0.1);
  std::vector<double> w(20, 0.3);
  for (std::size_t i = 0; i < obj.size(); ++i) {
    SparseVec g;
    obj.component_grad_support(w, i, g);
    for (int D : {1, 2, 4}) {
      FilterPartition part = build_partition(obj.support(i), D);
      // mean over u of d * (slice of g) must equal g coordinatewise
      std::vector<double> mean(g.size(), 0.0);
      for (int u = 0; u < part.d; ++u) {
        auto [first, last] = part.slices[u];
        for (std::size_t k = first; k < last; ++k)
          mean[k] += static_cast<double>(part.d) * g.val[k] / part.d;
      }
      for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(mean[k] == doctest::Approx(g.val[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("divergence guard triggers for eta > 2/L") {
  auto obj = one_dim_quadratic();  // L = 2, stability needs eta < 1
  StepSchedule sched = StepSchedule::constant(5.0, 5.0);
  SeqRunOptions o;
  o.T = 1000;
  o.record_every = 1000;
  o.seed = 1;
  CHECK_THROWS_AS(run_seq(*obj, sched, o), DivergenceError);
}

TEST_CASE("T = 0 gives a single-row trace") {
  auto obj = one_dim_quadratic();
  StepSchedule sched = StepSchedule::constant(0.1, 0.1);
  SeqRunOptions o;
  o.T = 0;
  o.seed = 1;
  Trace tr = run_seq(*obj, sched, o);
  REQUIRE(tr.rows.size() == 1);
  CHECK(tr.rows[0].t == 0);
  CHECK(tr.rows[0].loss == doctest::Approx(4.0));
}

TEST_CASE("theorem_sgd schedule converges on the separable quadratic") {
  SyntheticProblem sp = make_separable_least_squares(10, 1.0 / std::sqrt(2.0),
                                                     1.0, 1.0);
  StepSchedule sched = StepSchedule::theorem_sgd(sp.constants.mu, sp.constants.L);
  SeqRunOptions o;
  o.mode = SeqMode::sgd;
  o.T = 1000000;
  o.record_every = o.T;
  o.seed = 5;
  o.w_star = &*sp.constants.w_star;
  Trace tr = run_seq(*sp.problem, sched, o);
  double d0 = tr.rows.front().dist_sq;
  double dT = tr.rows.back().dist_sq;
  CHECK(d0 == doctest::Approx(10.0));
  CHECK(dT < 1e-3 * d0);
}

TEST_CASE("fraction mode runs and makes progress") {
  SyntheticProblem sp = make_synthetic_logistic(8, 80, 0.7, 6);
  StepSchedule sched = StepSchedule::theorem_sgd(sp.constants.mu, sp.constants.L);
  SeqRunOptions o;
  o.mode = SeqMode::fraction;
  o.fraction_v = 0.5;
  o.T = 5000;
  o.record_every = 5000;
  o.seed = 2;
  Trace tr = run_seq(*sp.problem, sched, o);
  CHECK(tr.rows.back().loss < tr.rows.front().loss);
  // half of the 8 dense coordinates are written per iteration
  CHECK(tr.rows.back().t_prime == 4 * tr.rows.back().t);
}
