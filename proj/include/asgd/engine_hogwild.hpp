#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "asgd/engine_seq.hpp"
#include "asgd/objective.hpp"
#include "asgd/schedule.hpp"
#include "asgd/trace.hpp"

namespace asgd {

// Shared parameter vector with single-cell atomic loads and atomic adds.
// No whole-vector consistency; the add is a CAS loop so concurrent deltas
// on the same cell commute exactly.
class SharedModel {
 public:
  explicit SharedModel(std::size_t dim) : dim_(dim), cells_(new Cell[dim]) {
    for (std::size_t i = 0; i < dim; ++i) cells_[i].v.store(0.0);
  }

  std::size_t size() const { return dim_; }

  double load(std::size_t i) const {
    return cells_[i].v.load(std::memory_order_relaxed);
  }

  void store(std::size_t i, double x) {
    cells_[i].v.store(x, std::memory_order_relaxed);
  }

  void add(std::size_t i, double delta) {
    auto& c = cells_[i].v;
    double cur = c.load(std::memory_order_relaxed);
    while (!c.compare_exchange_weak(cur, cur + delta,
                                    std::memory_order_relaxed)) {
    }
  }

  std::vector<double> snapshot() const {
    std::vector<double> out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) out[i] = load(i);
    return out;
  }

 private:
  struct alignas(64) Cell {  // one cache line per cell
    std::atomic<double> v;
  };
  std::size_t dim_;
  std::unique_ptr<Cell[]> cells_;
};

enum class MaskPolicy { all_in, none_in, bernoulli, per_coordinate_random };

struct MaskConfig {
  MaskPolicy policy = MaskPolicy::bernoulli;
  double p = 0.5;  // bernoulli inclusion probability per update per coord
};

struct DelaySimOptions {
  int D = 1;
  bool use_fraction = false;
  double fraction_v = 1.0;
  std::uint64_t tau = 0;
  MaskConfig mask;
  std::uint64_t T = 0;
  std::uint64_t record_every = 1;
  std::uint64_t seed = 0;
  std::vector<double> w0;
  const std::vector<double>* w_star = nullptr;
};

// Deterministic single-threaded simulator of the delay-tau read model:
// hat-w_t = w_{t-tau} plus the mask-selected part of the last tau updates.
// tau = 0 is stream- and bit-identical to the sequential filtered engine.
Trace run_delay_sim(const Problem& p, const StepSchedule& sched,
                    const DelaySimOptions& opt);

// Same simulator with a growing buffer length tau(t) (monotone enforced by
// running max). The schedule is expected to use E(t) = 2 tau(t).
Trace run_delay_sim_growing(const Problem& p, const StepSchedule& sched,
                            const std::function<double(double)>& tau_fn,
                            const DelaySimOptions& opt);

struct ParallelOptions {
  int D = 1;
  bool use_fraction = false;
  double fraction_v = 1.0;
  int workers = 1;
  std::uint64_t T = 0;
  std::uint64_t record_every = 0;  // 0 = initial and final snapshot only
  std::uint64_t seed = 0;
  std::vector<double> w0;
  const std::vector<double>* w_star = nullptr;
};

// Lock-free shared-memory execution: P workers, per-cell atomic reads and
// adds, a global atomic counter assigning t (hence eta_t) to each update.
// Trace snapshots are inconsistent reads by design and flagged as such;
// with workers = 1 the trajectory equals the sequential filtered engine
// exactly.
Trace run_parallel(const Problem& p, const StepSchedule& sched,
                   const ParallelOptions& opt);

// Per-row actual t' next to the theoretical expectation t * delta_bar_D / D.
struct CoordUpdateRow {
  std::uint64_t t;
  std::uint64_t actual;
  double expected;
};
std::vector<CoordUpdateRow> coordinate_update_count(const Trace& trace,
                                                    double delta_bar_D, int D);

}  // namespace asgd
