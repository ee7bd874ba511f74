#include "asgd/objective.hpp"

#include <algorithm>
#include <cmath>

namespace asgd {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + exp(z)) without overflow
double log1pexp(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sparse_dot(const Example& e, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t k = 0; k < e.indices.size(); ++k)
    s += e.values[k] * w[e.indices[k]];
  return s;
}

double norm_sq(std::span<const double> w) {
  double s = 0.0;
  for (double x : w) s += x * x;
  return s;
}

}  // namespace

Objective::Objective(LossKind kind, std::shared_ptr<const Dataset> data,
                     double lambda)
    : kind_(kind), data_(std::move(data)), lambda_(lambda) {
  if (!data_ || data_->n() == 0)
    throw std::invalid_argument("objective needs a nonempty dataset");
  if (lambda_ < 0) throw std::invalid_argument("lambda must be nonnegative");
}

double Objective::component_loss(std::span<const double> w,
                                 std::size_t i) const {
  const Example& e = data_->examples[i];
  double z = sparse_dot(e, w);
  double reg = 0.5 * lambda_ * norm_sq(w);
  if (kind_ == LossKind::logistic) return log1pexp(-e.label * z) + reg;
  double r = z - e.label;
  return r * r + reg;
}

// data-term scale: g such that grad = g * x (+ lambda w)
static double grad_factor(LossKind kind, double label, double z) {
  if (kind == LossKind::logistic) return -label * sigmoid(-label * z);
  return 2.0 * (z - label);
}

void Objective::component_grad(std::span<const double> w, std::size_t i,
                               std::vector<double>& out) const {
  if (w.size() != dim()) throw std::invalid_argument("dimension mismatch");
  const Example& e = data_->examples[i];
  double g = grad_factor(kind_, e.label, sparse_dot(e, w));
  out.assign(w.size(), 0.0);
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = lambda_ * w[j];
  for (std::size_t k = 0; k < e.indices.size(); ++k)
    out[e.indices[k]] += g * e.values[k];
}

void Objective::component_grad_support(std::span<const double> w,
                                       std::size_t i, SparseVec& out) const {
  if (w.size() != dim()) throw std::invalid_argument("dimension mismatch");
  const Example& e = data_->examples[i];
  double g = grad_factor(kind_, e.label, sparse_dot(e, w));
  out.clear();
  out.idx = e.indices;
  out.val.resize(e.indices.size());
  for (std::size_t k = 0; k < e.indices.size(); ++k)
    out.val[k] = g * e.values[k] + lambda_ * w[e.indices[k]];
}

double Objective::smoothness() const {
  double max_row = 0.0;
  for (const Example& e : data_->examples) {
    double s = 0.0;
    for (double v : e.values) s += v * v;
    max_row = std::max(max_row, s);
  }
  if (kind_ == LossKind::logistic) return max_row / 4.0 + lambda_;
  return 2.0 * max_row + lambda_;
}

double full_objective(const Problem& p, std::span<const double> w) {
  if (w.size() != p.dim()) throw std::invalid_argument("dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p.component_loss(w, i);
  return s / static_cast<double>(p.size());
}

double estimate_L(const Objective& obj) { return obj.smoothness(); }

double estimate_mu(const Objective& obj) {
  if (obj.lambda() <= 0.0)
    throw std::invalid_argument("not strongly convex: lambda = 0");
  return obj.lambda();
}

double estimate_N(const Problem& p, std::span<const double> w_star) {
  std::vector<double> g;
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p.component_grad(w_star, i, g);
    double ns = 0.0;
    for (double x : g) ns += x * x;
    s += ns;
  }
  return 2.0 * s / static_cast<double>(p.size());
}

void batch_grad(const Problem& p, std::span<const double> w,
                std::span<const std::size_t> batch, std::vector<double>& out) {
  out.assign(p.dim(), 0.0);
  std::vector<double> g;
  for (std::size_t i : batch) {
    p.component_grad(w, i, g);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += g[j];
  }
  double inv = 1.0 / static_cast<double>(batch.size());
  for (double& x : out) x *= inv;
}

namespace {

void full_grad(const Problem& p, std::span<const double> w,
               std::vector<double>& out, std::vector<double>& scratch) {
  out.assign(p.dim(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p.component_grad(w, i, scratch);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += scratch[j];
  }
  double inv = 1.0 / static_cast<double>(p.size());
  for (double& x : out) x *= inv;
}

}  // namespace

ReferenceSolution solve_reference(const Problem& p, double tol,
                                  std::size_t max_iterations) {
  const std::size_t d = p.dim();
  double L = p.smoothness();
  double mu = p.strong_convexity();
  double step = 1.0 / L;
  // Nesterov momentum; strongly convex coefficient when mu is certified,
  // convex (k-1)/(k+2) with gradient restarts otherwise.
  double sc_mom = 0.0;
  if (mu > 0) {
    double rk = std::sqrt(L / mu);
    sc_mom = (rk - 1.0) / (rk + 1.0);
  }
  std::vector<double> x(d, 0.0), x_prev(d, 0.0), y(d, 0.0), grad, scratch;
  std::size_t since_restart = 0;
  double gnorm = 0.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    // certify at x, step from y
    full_grad(p, x, grad, scratch);
    gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm <= tol) return {x, full_objective(p, x), gnorm, it};
    full_grad(p, y, grad, scratch);
    double mom = mu > 0 ? sc_mom
                        : static_cast<double>(since_restart) /
                              (static_cast<double>(since_restart) + 3.0);
    double desc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double xn = y[j] - step * grad[j];
      desc += grad[j] * (xn - x[j]);
      x_prev[j] = x[j];
      x[j] = xn;
    }
    if (desc > 0) {  // momentum overshoot, restart
      since_restart = 0;
      y = x;
    } else {
      ++since_restart;
      for (std::size_t j = 0; j < d; ++j)
        y[j] = x[j] + mom * (x[j] - x_prev[j]);
    }
  }
  ReferenceSolution best{x, full_objective(p, x), gnorm, max_iterations};
  throw SolveError("solve_reference did not reach tolerance", std::move(best));
}

}  // namespace asgd
