#pragma once

#include <cstdint>
#include <memory>

#include "asgd/dataset.hpp"
#include "asgd/objective.hpp"

namespace asgd {

struct SyntheticProblem {
  std::shared_ptr<Problem> problem;
  ProblemConstants constants;
  std::shared_ptr<const Dataset> data;  // null for non-dataset presets
};

// Separable least-squares preset: dim coordinates, two examples per
// coordinate with x = a e_j and targets a (t_j +/- spread), lambda = 0.
// Closed forms: w*_j = t_j, L = 2 a^2, mu = 2 a^2 / dim, N = 8 a^4 spread^2.
// N > 0 whenever spread != 0.
SyntheticProblem make_separable_least_squares(int dim, double a,
                                              double target, double spread);

// The two-component 1-d example f1(w) = w^2/2, f2(w) = w, so
// F(w) = (w^2/2 + w)/2 with w* = -1. Demonstrates unbounded E|grad f|^2
// along a path even though F is strongly convex.
SyntheticProblem make_two_component_1d();

// Dense Gaussian logistic regression: features scaled to |x| ~= scale,
// labels from a planted separator with 10% flips so N > 0. lambda defaults
// to 1/n. Constants are filled from the certified estimates and a
// solve_reference run.
SyntheticProblem make_synthetic_logistic(int dim, std::size_t n, double scale,
                                         std::uint64_t seed,
                                         double lambda = -1.0,
                                         double reference_tol = 1e-10);

// Sparse variant used by partition/sparsity tests: each example has a
// random support of the given size.
std::shared_ptr<Dataset> make_sparse_dataset(int dim, std::size_t n,
                                             int support_size,
                                             std::uint64_t seed);

}  // namespace asgd
