// Throughput benchmark: serial filtered reference vs the OpenMP shared-model
// engine at several worker counts, on a synthetic sparse logistic problem.
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "asgd/engine_hogwild.hpp"
#include "asgd/synthetic.hpp"

using namespace asgd;

int main(int argc, char** argv) {
  std::uint64_t T = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2'000'000;
  int dim = 2000, support = 20;
  std::size_t n = 20000;
  auto data = make_sparse_dataset(dim, n, support, 7);
  Objective obj(LossKind::logistic, data, 1.0 / static_cast<double>(n));
  double L = estimate_L(obj), mu = estimate_mu(obj);
  int D = 4;
  StepSchedule sched = StepSchedule::hogwild(mu, L, D, /*tau=*/16);

  std::cout << "n=" << n << " dim=" << dim << " support=" << support
            << " D=" << D << " T=" << T << "\n";
  std::cout << "engine,workers,seconds,updates_per_sec,final_loss\n";

  {
    SeqRunOptions o;
    o.mode = SeqMode::filtered;
    o.D = D;
    o.T = T;
    o.record_every = T;  // endpoints only
    o.seed = 1;
    auto t0 = std::chrono::steady_clock::now();
    Trace tr = run_seq(obj, sched, o);
    double sec = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
    std::cout << "serial,1," << sec << ',' << T / sec << ','
              << tr.rows.back().loss << '\n';
  }
  for (int workers : {1, 2, 4, 8}) {
    ParallelOptions o;
    o.D = D;
    o.workers = workers;
    o.T = T;
    o.record_every = 0;  // endpoints only
    o.seed = 1;
    auto t0 = std::chrono::steady_clock::now();
    Trace tr = run_parallel(obj, sched, o);
    double sec = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
    std::cout << "parallel," << workers << ',' << sec << ',' << T / sec << ','
              << tr.rows.back().loss << '\n';
  }
  return 0;
}
