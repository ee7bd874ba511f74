#include "asgd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "asgd/rng.hpp"

namespace asgd {

namespace {

// f_i(w) = (c_i/2) w^2 + g_i w in one dimension.
class Quadratic1D : public Problem {
 public:
  Quadratic1D(std::vector<double> curv, std::vector<double> lin)
      : curv_(std::move(curv)), lin_(std::move(lin)), support_{0} {}

  std::uint32_t dim() const override { return 1; }
  std::size_t size() const override { return curv_.size(); }
  double component_loss(std::span<const double> w,
                        std::size_t i) const override {
    return 0.5 * curv_[i] * w[0] * w[0] + lin_[i] * w[0];
  }
  void component_grad(std::span<const double> w, std::size_t i,
                      std::vector<double>& out) const override {
    out.assign(1, curv_[i] * w[0] + lin_[i]);
  }
  void component_grad_support(std::span<const double> w, std::size_t i,
                              SparseVec& out) const override {
    out.clear();
    out.idx = {0};
    out.val = {curv_[i] * w[0] + lin_[i]};
  }
  const std::vector<std::uint32_t>& support(std::size_t) const override {
    return support_;
  }
  double smoothness() const override {
    return *std::max_element(curv_.begin(), curv_.end());
  }
  double strong_convexity() const override {
    double s = 0.0;
    for (double c : curv_) s += c;
    return s / curv_.size();
  }

 private:
  std::vector<double> curv_, lin_;
  std::vector<std::uint32_t> support_;
};

}  // namespace

SyntheticProblem make_separable_least_squares(int dim, double a, double target,
                                              double spread) {
  if (dim < 1 || a <= 0.0)
    throw std::invalid_argument("bad separable problem parameters");
  auto data = std::make_shared<Dataset>();
  data->dim = static_cast<std::uint32_t>(dim);
  for (int j = 0; j < dim; ++j) {
    for (double sign : {+1.0, -1.0}) {
      Example e;
      e.label = a * (target + sign * spread);
      e.indices = {static_cast<std::uint32_t>(j)};
      e.values = {a};
      data->examples.push_back(std::move(e));
    }
  }
  SyntheticProblem sp;
  sp.data = data;
  sp.problem = std::make_shared<Objective>(LossKind::least_squares, data, 0.0);
  sp.constants.L = 2.0 * a * a;
  sp.constants.mu = 2.0 * a * a / dim;
  sp.constants.kappa = sp.constants.L / sp.constants.mu;
  // each component gradient at w* is -/+ 2 a^2 spread on its coordinate
  sp.constants.N = 8.0 * a * a * a * a * spread * spread;
  sp.constants.w_star = std::vector<double>(dim, target);
  std::span<const double> ws(*sp.constants.w_star);
  sp.constants.f_star = full_objective(*sp.problem, ws);
  return sp;
}

SyntheticProblem make_two_component_1d() {
  // f1(w) = w^2/2, f2(w) = w; F(w) = (w^2/2 + w)/2, w* = -1
  SyntheticProblem sp;
  sp.problem = std::make_shared<Quadratic1D>(std::vector<double>{1.0, 0.0},
                                             std::vector<double>{0.0, 1.0});
  sp.constants.L = 1.0;
  sp.constants.mu = 0.5;
  sp.constants.kappa = 2.0;
  sp.constants.w_star = std::vector<double>{-1.0};
  std::span<const double> ws(*sp.constants.w_star);
  sp.constants.f_star = full_objective(*sp.problem, ws);
  sp.constants.N = estimate_N(*sp.problem, ws);
  return sp;
}

SyntheticProblem make_synthetic_logistic(int dim, std::size_t n, double scale,
                                         std::uint64_t seed, double lambda,
                                         double reference_tol) {
  if (dim < 1 || n < 2)
    throw std::invalid_argument("bad synthetic logistic parameters");
  if (lambda < 0.0) lambda = 1.0 / static_cast<double>(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution flip(0.1);
  std::vector<double> w_true(dim);
  for (double& x : w_true) x = gauss(rng);
  double per_coord = scale / std::sqrt(static_cast<double>(dim));
  auto data = std::make_shared<Dataset>();
  data->dim = static_cast<std::uint32_t>(dim);
  for (std::size_t i = 0; i < n; ++i) {
    Example e;
    double z = 0.0;
    for (int j = 0; j < dim; ++j) {
      double x = gauss(rng) * per_coord;
      e.indices.push_back(static_cast<std::uint32_t>(j));
      e.values.push_back(x);
      z += x * w_true[j];
    }
    e.label = (z >= 0 ? 1.0 : -1.0) * (flip(rng) ? -1.0 : 1.0);
    data->examples.push_back(std::move(e));
  }
  SyntheticProblem sp;
  sp.data = data;
  auto obj = std::make_shared<Objective>(LossKind::logistic, data, lambda);
  sp.problem = obj;
  sp.constants.L = estimate_L(*obj);
  sp.constants.mu = estimate_mu(*obj);
  sp.constants.kappa = sp.constants.L / sp.constants.mu;
  ReferenceSolution ref = solve_reference(*obj, reference_tol);
  sp.constants.f_star = ref.f_star;
  sp.constants.N = estimate_N(*obj, ref.w_star);
  sp.constants.w_star = std::move(ref.w_star);
  return sp;
}

std::shared_ptr<Dataset> make_sparse_dataset(int dim, std::size_t n,
                                             int support_size,
                                             std::uint64_t seed) {
  if (support_size < 1 || support_size > dim)
    throw std::invalid_argument("bad support size");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto data = std::make_shared<Dataset>();
  data->dim = static_cast<std::uint32_t>(dim);
  std::vector<std::uint32_t> coords(dim);
  for (int j = 0; j < dim; ++j) coords[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < support_size; ++k) {
      std::size_t j = k + uniform_index(rng, dim - k);
      std::swap(coords[k], coords[j]);
    }
    Example e;
    e.indices.assign(coords.begin(), coords.begin() + support_size);
    std::sort(e.indices.begin(), e.indices.end());
    for (std::size_t k = 0; k < e.indices.size(); ++k) {
      double v = gauss(rng);
      e.values.push_back(v == 0.0 ? 1.0 : v);
    }
    e.label = gauss(rng) >= 0 ? 1.0 : -1.0;
    data->examples.push_back(std::move(e));
  }
  return data;
}

}  // namespace asgd
