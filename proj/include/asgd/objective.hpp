#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "asgd/dataset.hpp"

namespace asgd {

struct SparseVec {
  std::vector<std::uint32_t> idx;
  std::vector<double> val;

  void clear() {
    idx.clear();
    val.clear();
  }
  std::size_t size() const { return idx.size(); }
};

// A finite-sum problem F(w) = (1/n) sum_i f_i(w). Engines only touch this
// interface; the concrete loss families and the synthetic presets both
// implement it.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::uint32_t dim() const = 0;
  virtual std::size_t size() const = 0;  // n, number of components

  virtual double component_loss(std::span<const double> w,
                                std::size_t i) const = 0;

  // Dense gradient of f_i, including the full regularizer term.
  virtual void component_grad(std::span<const double> w, std::size_t i,
                              std::vector<double>& out) const = 0;

  // Gradient restricted to support(i): data term plus lambda*w on the
  // support coordinates, in support order. This is what the filter engines
  // apply, so that updates touch exactly the coordinates of D_xi.
  virtual void component_grad_support(std::span<const double> w, std::size_t i,
                                      SparseVec& out) const = 0;

  virtual const std::vector<std::uint32_t>& support(std::size_t i) const = 0;

  // Certified constants: component smoothness upper bound and strong
  // convexity lower bound for F (0 when none is certified).
  virtual double smoothness() const = 0;
  virtual double strong_convexity() const = 0;
};

enum class LossKind { logistic, least_squares };

// l2-regularized loss family over a sparse dataset.
//   logistic:       f_i(w) = log(1 + exp(-y_i <x_i,w>)) + (lambda/2) |w|^2
//   least_squares:  f_i(w) = (<x_i,w> - y_i)^2        + (lambda/2) |w|^2
class Objective : public Problem {
 public:
  Objective(LossKind kind, std::shared_ptr<const Dataset> data, double lambda);

  std::uint32_t dim() const override { return data_->dim; }
  std::size_t size() const override { return data_->n(); }
  double component_loss(std::span<const double> w,
                        std::size_t i) const override;
  void component_grad(std::span<const double> w, std::size_t i,
                      std::vector<double>& out) const override;
  void component_grad_support(std::span<const double> w, std::size_t i,
                              SparseVec& out) const override;
  const std::vector<std::uint32_t>& support(std::size_t i) const override {
    return data_->examples[i].indices;
  }
  double smoothness() const override;
  double strong_convexity() const override { return lambda_; }

  LossKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const Dataset& data() const { return *data_; }

 private:
  LossKind kind_;
  std::shared_ptr<const Dataset> data_;
  double lambda_;
};

struct ProblemConstants {
  double mu = 0.0;     // strong convexity of F
  double L = 0.0;      // component smoothness
  double kappa = 1.0;  // L / mu
  double N = 0.0;      // 2 E|grad f(w*;xi)|^2
  std::optional<std::vector<double>> w_star;
  std::optional<double> f_star;
};

double full_objective(const Problem& p, std::span<const double> w);

// Row-norm smoothness bound: max_i |x_i|^2/4 + lambda (logistic),
// max_i 2|x_i|^2 + lambda (least squares).
double estimate_L(const Objective& obj);

// mu = lambda; throws when lambda <= 0 (not strongly convex).
double estimate_mu(const Objective& obj);

// N = (2/n) sum_i |grad f_i(w*)|^2, exact finite sum.
double estimate_N(const Problem& p, std::span<const double> w_star);

// Dense average of component gradients over an index batch.
void batch_grad(const Problem& p, std::span<const double> w,
                std::span<const std::size_t> batch, std::vector<double>& out);

struct ReferenceSolution {
  std::vector<double> w_star;
  double f_star = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, ReferenceSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const ReferenceSolution& best() const { return best_; }

 private:
  ReferenceSolution best_;
};

// Deterministic full-gradient minimizer (Nesterov with restarts) driven to
// |grad F(w)| <= tol. Throws SolveError with the best iterate on cap.
ReferenceSolution solve_reference(const Problem& p, double tol = 1e-10,
                                  std::size_t max_iterations = 2'000'000);

}  // namespace asgd
