#include "asgd/engine_hogwild.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <thread>

namespace asgd {

namespace {

struct PendingUpdate {
  std::vector<std::uint32_t> idx;
  std::vector<double> delta;
};

struct DistRecorder {
  const std::vector<double>* w_star;
  double operator()(std::span<const double> w) const {
    if (!w_star) return std::numeric_limits<double>::quiet_NaN();
    double d2 = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      double diff = w[j] - (*w_star)[j];
      d2 += diff * diff;
    }
    return d2;
  }
};

Trace delay_sim_core(const Problem& p, const StepSchedule& sched,
                     const std::function<std::uint64_t(std::uint64_t)>& tau_at,
                     const DelaySimOptions& opt) {
  const std::size_t n = p.size();
  RngBundle rng(opt.seed);
  std::vector<double> current =
      opt.w0.empty() ? std::vector<double>(p.dim(), 0.0) : opt.w0;
  std::vector<double> committed = current;
  std::vector<double> what(current.size());
  std::deque<PendingUpdate> pending;
  PartitionCache parts(p, opt.D);
  std::vector<long long> coord_cut(p.dim(), -1);  // per_coordinate_random
  std::uint64_t t = 0, coord_updates = 0;
  DistRecorder dist{opt.w_star};

  Trace trace;
  trace.seed = opt.seed;
  auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    TraceRow row;
    row.t = t;
    row.t_prime = coord_updates;
    row.loss = full_objective(p, current);
    row.dist_sq = dist(current);
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    trace.rows.push_back(row);
  };
  std::uint64_t every = std::max<std::uint64_t>(1, opt.record_every);
  record();

  std::uint64_t tau_floor = 0;  // running max keeps the buffer monotone
  std::bernoulli_distribution keep(opt.mask.p);
  while (t < opt.T) {
    tau_floor = std::max(tau_floor, tau_at(t));
    // commit updates older than iteration t - tau
    while (pending.size() > tau_floor) {
      const PendingUpdate& u = pending.front();
      for (std::size_t k = 0; k < u.idx.size(); ++k)
        committed[u.idx[k]] += u.delta[k];
      pending.pop_front();
    }
    // hat-w = committed plus the mask-included pending deltas, replayed in
    // iteration order. Replaying forward keeps the extremes bit-exact:
    // all_in reproduces the current iterate, none_in reads w_{t-tau}.
    what = committed;
    switch (opt.mask.policy) {
      case MaskPolicy::all_in:
        for (const PendingUpdate& u : pending)
          for (std::size_t k = 0; k < u.idx.size(); ++k)
            what[u.idx[k]] += u.delta[k];
        break;
      case MaskPolicy::none_in:
        break;
      case MaskPolicy::bernoulli:
        for (const PendingUpdate& u : pending)
          for (std::size_t k = 0; k < u.idx.size(); ++k)
            if (keep(rng.mask)) what[u.idx[k]] += u.delta[k];
        break;
      case MaskPolicy::per_coordinate_random: {
        // each coordinate sees a random prefix of the pending updates,
        // modeling a per-entry read time
        std::vector<std::uint32_t> touched;
        long long sz = static_cast<long long>(pending.size());
        for (long long k = 0; k < sz; ++k) {
          const PendingUpdate& u = pending[k];
          for (std::size_t m = 0; m < u.idx.size(); ++m) {
            std::uint32_t j = u.idx[m];
            if (coord_cut[j] < 0) {
              coord_cut[j] = static_cast<long long>(
                  uniform_index(rng.mask, pending.size() + 1));
              touched.push_back(j);
            }
            if (k < coord_cut[j]) what[j] += u.delta[m];
          }
        }
        for (std::uint32_t j : touched) coord_cut[j] = -1;
        break;
      }
    }

    double eta = sched.eta(t);
    std::size_t i = uniform_index(rng.example, n);
    const auto& sup = p.support(i);
    if (!sup.empty()) {
      SparseVec g;
      PendingUpdate upd;
      if (opt.use_fraction) {
        std::vector<std::uint32_t> subset =
            fraction_filter(sup, opt.fraction_v, rng.filter);
        p.component_grad_support(what, i, g);
        std::size_t k = 0;
        for (std::uint32_t j : subset) {
          while (g.idx[k] != j) ++k;
          upd.idx.push_back(j);
          upd.delta.push_back(-(eta * g.val[k]));
        }
      } else {
        const FilterPartition& part = parts.get(i);
        FilterDraw draw = sample_filter(part, rng.filter);
        p.component_grad_support(what, i, g);
        for (std::size_t k = draw.first; k < draw.last; ++k) {
          upd.idx.push_back(g.idx[k]);
          upd.delta.push_back(-(eta * draw.d * g.val[k]));
        }
      }
      for (std::size_t k = 0; k < upd.idx.size(); ++k) {
        double& cell = current[upd.idx[k]];
        cell += upd.delta[k];
        if (!std::isfinite(cell)) throw DivergenceError(t);
      }
      coord_updates += upd.idx.size();
      pending.push_back(std::move(upd));
    } else {
      pending.push_back({});  // no-op iteration still occupies a slot
    }
    ++t;
    if (t % every == 0 || t == opt.T) record();
  }
  return trace;
}

}  // namespace

Trace run_delay_sim(const Problem& p, const StepSchedule& sched,
                    const DelaySimOptions& opt) {
  return delay_sim_core(
      p, sched, [&](std::uint64_t) { return opt.tau; }, opt);
}

Trace run_delay_sim_growing(const Problem& p, const StepSchedule& sched,
                            const std::function<double(double)>& tau_fn,
                            const DelaySimOptions& opt) {
  return delay_sim_core(
      p, sched,
      [&](std::uint64_t t) {
        return static_cast<std::uint64_t>(
            std::floor(tau_fn(static_cast<double>(t))));
      },
      opt);
}

Trace run_parallel(const Problem& p, const StepSchedule& sched,
                   const ParallelOptions& opt) {
  const std::size_t n = p.size();
  const std::size_t dim = p.dim();
  SharedModel model(dim);
  if (!opt.w0.empty())
    for (std::size_t j = 0; j < dim; ++j) model.store(j, opt.w0[j]);

  // partitions are pure functions of (support, D); build once, share
  // read-only
  std::vector<FilterPartition> parts;
  if (!opt.use_fraction) {
    parts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      parts.push_back(p.support(i).empty()
                          ? FilterPartition{}
                          : build_partition(p.support(i), opt.D));
  }

  std::atomic<std::uint64_t> counter{0};
  std::atomic<std::uint64_t> writes{0};
  std::atomic<bool> failed{false};
  std::atomic<std::uint64_t> failed_t{0};

  struct Snap {
    std::uint64_t t;
    std::uint64_t t_prime;
    std::vector<double> w;
    double wall;
  };
  std::vector<Snap> snaps;
  auto start = std::chrono::steady_clock::now();
  auto wall = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };
  snaps.push_back({0, 0, model.snapshot(), 0.0});

  std::atomic<bool> done{false};
  std::thread sampler;
  if (opt.record_every > 0) {
    sampler = std::thread([&] {
      std::uint64_t next = opt.record_every;
      while (!done.load(std::memory_order_acquire)) {
        std::uint64_t t_now = counter.load(std::memory_order_relaxed);
        if (t_now >= next && next < opt.T) {
          snaps.push_back({std::min(t_now, opt.T),
                           writes.load(std::memory_order_relaxed),
                           model.snapshot(), wall()});
          next += opt.record_every;
        } else {
          std::this_thread::sleep_for(std::chrono::microseconds(200));
        }
      }
    });
  }

#pragma omp parallel num_threads(opt.workers)
  {
    int worker = omp_get_thread_num();
    RngBundle rng(opt.seed, static_cast<std::uint64_t>(worker));
    std::vector<double> scratch(dim, 0.0);
    SparseVec g;
    while (true) {
      std::uint64_t t = counter.fetch_add(1, std::memory_order_relaxed);
      if (t >= opt.T || failed.load(std::memory_order_relaxed)) break;
      double eta = sched.eta(t);
      std::size_t i = uniform_index(rng.example, n);
      const auto& sup = p.support(i);
      if (sup.empty()) continue;
      std::size_t first = 0, last = sup.size();
      int d = 1;
      std::vector<std::uint32_t> subset;
      if (opt.use_fraction) {
        subset = fraction_filter(sup, opt.fraction_v, rng.filter);
      } else {
        FilterDraw draw = sample_filter(parts[i], rng.filter);
        first = draw.first;
        last = draw.last;
        d = draw.d;
      }
      // per-cell atomic reads of exactly the coordinates the gradient needs
      bool bad = false;
      for (std::uint32_t j : sup) {
        scratch[j] = model.load(j);
        if (!std::isfinite(scratch[j])) bad = true;
      }
      if (bad) {
        failed.store(true, std::memory_order_relaxed);
        failed_t.store(t, std::memory_order_relaxed);
        break;
      }
      p.component_grad_support(scratch, i, g);
      std::uint64_t written = 0;
      if (opt.use_fraction) {
        std::size_t k = 0;
        for (std::uint32_t j : subset) {
          while (g.idx[k] != j) ++k;
          model.add(j, -(eta * g.val[k]));
          ++written;
        }
      } else {
        for (std::size_t k = first; k < last; ++k) {
          model.add(g.idx[k], -(eta * d * g.val[k]));
          ++written;
        }
      }
      writes.fetch_add(written, std::memory_order_relaxed);
    }
  }
  done.store(true, std::memory_order_release);
  if (sampler.joinable()) sampler.join();
  if (failed.load()) throw DivergenceError(failed_t.load());
  snaps.push_back(
      {opt.T, writes.load(std::memory_order_relaxed), model.snapshot(), wall()});

  DistRecorder dist{opt.w_star};
  Trace trace;
  trace.seed = opt.seed;
  trace.inconsistent_reads = opt.workers > 1;
  for (const Snap& s : snaps) {
    TraceRow row;
    row.t = s.t;
    row.t_prime = s.t_prime;
    row.loss = full_objective(p, s.w);
    row.dist_sq = dist(s.w);
    row.wall_seconds = s.wall;
    trace.rows.push_back(row);
  }
  return trace;
}

std::vector<CoordUpdateRow> coordinate_update_count(const Trace& trace,
                                                    double delta_bar_D,
                                                    int D) {
  std::vector<CoordUpdateRow> out;
  out.reserve(trace.rows.size());
  for (const TraceRow& r : trace.rows)
    out.push_back({r.t, r.t_prime,
                   static_cast<double>(r.t) * delta_bar_D / D});
  return out;
}

}  // namespace asgd
