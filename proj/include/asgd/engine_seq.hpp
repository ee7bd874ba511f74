#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "asgd/objective.hpp"
#include "asgd/partition.hpp"
#include "asgd/rng.hpp"
#include "asgd/schedule.hpp"
#include "asgd/trace.hpp"

namespace asgd {

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::uint64_t t)
      : std::runtime_error("iterate diverged (NaN/Inf) at t = " +
                          std::to_string(t)),
        t_(t) {}
  std::uint64_t t() const { return t_; }

 private:
  std::uint64_t t_;
};

struct RunState {
  std::vector<double> w;
  std::uint64_t t = 0;
  std::uint64_t coord_updates = 0;  // the t' numerator
  RngBundle rng;

  RunState(std::vector<double> w0, std::uint64_t seed,
           std::uint64_t worker = 0)
      : w(std::move(w0)), rng(seed, worker) {}
};

// Lazily built per-example partitions; support and D fixed for a run.
class PartitionCache {
 public:
  PartitionCache(const Problem& p, int D) : problem_(&p), D_(D) {
    cache_.resize(p.size());
  }
  const FilterPartition& get(std::size_t i);
  int D() const { return D_; }

 private:
  const Problem* problem_;
  int D_;
  std::vector<std::unique_ptr<FilterPartition>> cache_;
};

// Algorithm-1 step: unfiltered update with the support-restricted component
// gradient. Consumes one example draw.
void sgd_step(RunState& s, const Problem& p, const StepSchedule& sched);

// One application of the general recursion with hat-w = w (no delay).
void filtered_step(RunState& s, const Problem& p, const StepSchedule& sched,
                   PartitionCache& parts);

// Experiment-protocol variant: random subset of size v|support|, d = 1.
void fraction_step(RunState& s, const Problem& p, const StepSchedule& sched,
                   double v);

// Batch-mode update: i.i.d. batch of size k, partition built on the union
// support of the batch.
void batch_step(RunState& s, const Problem& p, const StepSchedule& sched,
                std::size_t k, int D);

enum class SeqMode { sgd, filtered, fraction, batch };

struct SeqRunOptions {
  SeqMode mode = SeqMode::sgd;
  int D = 1;
  std::size_t batch_k = 1;
  double fraction_v = 1.0;
  std::uint64_t T = 0;
  std::uint64_t record_every = 1;
  std::uint64_t seed = 0;
  std::vector<double> w0;  // empty = zeros
  const std::vector<double>* w_star = nullptr;
};

Trace run_seq(const Problem& p, const StepSchedule& sched,
              const SeqRunOptions& opt);

}  // namespace asgd
