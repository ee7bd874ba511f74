#include "asgd/engine_seq.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace asgd {

const FilterPartition& PartitionCache::get(std::size_t i) {
  auto& slot = cache_[i];
  if (!slot)
    slot = std::make_unique<FilterPartition>(
        build_partition(problem_->support(i), D_));
  return *slot;
}

namespace {

// shared by all sequential variants: apply deltas on a slice of the
// support-ordered gradient
void apply_slice(RunState& s, const SparseVec& g, std::size_t first,
                 std::size_t last, double scale) {
  for (std::size_t k = first; k < last; ++k) {
    double delta = -(scale * g.val[k]);
    double& cell = s.w[g.idx[k]];
    cell += delta;
    if (!std::isfinite(cell)) throw DivergenceError(s.t);
  }
  s.coord_updates += last - first;
}

}  // namespace

void sgd_step(RunState& s, const Problem& p, const StepSchedule& sched) {
  double eta = sched.eta(s.t);
  std::size_t i = uniform_index(s.rng.example, p.size());
  if (!p.support(i).empty()) {
    SparseVec g;
    p.component_grad_support(s.w, i, g);
    apply_slice(s, g, 0, g.size(), eta);
  }
  ++s.t;
}

void filtered_step(RunState& s, const Problem& p, const StepSchedule& sched,
                   PartitionCache& parts) {
  double eta = sched.eta(s.t);
  std::size_t i = uniform_index(s.rng.example, p.size());
  if (!p.support(i).empty()) {
    const FilterPartition& part = parts.get(i);
    FilterDraw draw = sample_filter(part, s.rng.filter);
    SparseVec g;
    p.component_grad_support(s.w, i, g);
    apply_slice(s, g, draw.first, draw.last, eta * draw.d);
  }
  ++s.t;
}

void fraction_step(RunState& s, const Problem& p, const StepSchedule& sched,
                   double v) {
  double eta = sched.eta(s.t);
  std::size_t i = uniform_index(s.rng.example, p.size());
  const auto& sup = p.support(i);
  if (!sup.empty()) {
    std::vector<std::uint32_t> subset = fraction_filter(sup, v, s.rng.filter);
    SparseVec g;
    p.component_grad_support(s.w, i, g);
    // subset is sorted, g follows support order; walk both
    std::size_t k = 0;
    for (std::uint32_t j : subset) {
      while (g.idx[k] != j) ++k;
      double delta = -(eta * g.val[k]);
      double& cell = s.w[j];
      cell += delta;
      if (!std::isfinite(cell)) throw DivergenceError(s.t);
    }
    s.coord_updates += subset.size();
  }
  ++s.t;
}

void batch_step(RunState& s, const Problem& p, const StepSchedule& sched,
                std::size_t k, int D) {
  if (k < 1 || k > p.size())
    throw std::invalid_argument("batch size out of range");
  double eta = sched.eta(s.t);
  // i.i.d. with replacement
  std::vector<std::size_t> batch(k);
  for (std::size_t b = 0; b < k; ++b)
    batch[b] = uniform_index(s.rng.example, p.size());
  // union support of the batch
  std::vector<std::uint32_t> uni;
  for (std::size_t i : batch) {
    const auto& sup = p.support(i);
    uni.insert(uni.end(), sup.begin(), sup.end());
  }
  std::sort(uni.begin(), uni.end());
  uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
  if (!uni.empty()) {
    // batch gradient restricted to the union support
    SparseVec g;
    g.idx = uni;
    g.val.assign(uni.size(), 0.0);
    SparseVec gi;
    for (std::size_t i : batch) {
      p.component_grad_support(s.w, i, gi);
      std::size_t pos = 0;
      for (std::size_t m = 0; m < gi.size(); ++m) {
        while (g.idx[pos] != gi.idx[m]) ++pos;
        g.val[pos] += gi.val[m];
      }
    }
    double inv = 1.0 / static_cast<double>(k);
    for (double& x : g.val) x *= inv;
    FilterPartition part = build_partition(g.idx, D);
    FilterDraw draw = sample_filter(part, s.rng.filter);
    apply_slice(s, g, draw.first, draw.last, eta * draw.d);
  }
  ++s.t;
}

Trace run_seq(const Problem& p, const StepSchedule& sched,
              const SeqRunOptions& opt) {
  RunState s(opt.w0.empty() ? std::vector<double>(p.dim(), 0.0) : opt.w0,
             opt.seed);
  PartitionCache parts(p, opt.D);
  Trace trace;
  trace.seed = opt.seed;
  auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    TraceRow row;
    row.t = s.t;
    row.t_prime = s.coord_updates;
    row.loss = full_objective(p, s.w);
    if (opt.w_star) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < s.w.size(); ++j) {
        double diff = s.w[j] - (*opt.w_star)[j];
        d2 += diff * diff;
      }
      row.dist_sq = d2;
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    trace.rows.push_back(row);
  };
  std::uint64_t every = std::max<std::uint64_t>(1, opt.record_every);
  record();  // initial point
  while (s.t < opt.T) {
    switch (opt.mode) {
      case SeqMode::sgd: sgd_step(s, p, sched); break;
      case SeqMode::filtered: filtered_step(s, p, sched, parts); break;
      case SeqMode::fraction: fraction_step(s, p, sched, opt.fraction_v); break;
      case SeqMode::batch:
        batch_step(s, p, sched, opt.batch_k, opt.D);
        break;
    }
    if (s.t % every == 0 || s.t == opt.T) record();
  }
  return trace;
}

}  // namespace asgd
