#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace asgd {

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScheduleFamily {
  classic,           // eta0 / (1 + t)
  theorem_sgd,       // alpha/(mu(t+E)), alpha = 2, E = 2 alpha L / mu
  hogwild_expected,  // alpha_t/(mu(t+E)), E = max{2 tau, 4 L alpha D / mu}
  hogwild_as,        // 1/(L D (2+beta)(k+t)), k >= 3 tau
  power,             // 1/(K+t)^q
  stepped,           // 4/(mu 2^h) for t+E in [2^h, 2^{h+1})
  constant,
  hogwild_growing,   // alpha_t/(mu(t + 2 tau(t)))
};

enum class AlphaRule { constant4, constant_alpha, stepped };

// A step-size family as an immutable value. eta is a pure function of
// (schedule, t); t extends to a real argument so the theory module can
// integrate n(t) = mu * eta(t).
class StepSchedule {
 public:
  StepSchedule() = default;  // constant 0 placeholder; use the factories

  double eta(std::uint64_t t) const { return eta_real(static_cast<double>(t)); }
  double eta_real(double t) const;

  ScheduleFamily family() const { return family_; }
  double cap() const { return cap_; }
  double mu() const { return mu_; }
  double alpha() const { return alpha_; }
  double big_e() const { return E_; }  // E where the family defines one
  double tau_at(double t) const;       // hogwild_growing only; 0 otherwise

  double n_of(double t) const { return mu_ * eta_real(t); }
  // M(t) = integral_0^t n(x) dx; closed form per family, quadrature for
  // stepped.
  double M_of(double t) const;

  static StepSchedule theorem_sgd(double mu, double L, double alpha = 2.0);
  static StepSchedule hogwild(double mu, double L, int D, double tau,
                              double alpha = 4.0,
                              AlphaRule rule = AlphaRule::constant4);
  static StepSchedule hogwild_as(double L, int D, double beta, double k_offset,
                                 double tau, double mu_for_theory = 1.0);
  static StepSchedule power(double q, double K, double L,
                            double mu_for_theory = 1.0);
  static StepSchedule stepped(double mu, double E);
  static StepSchedule constant(double eta, double cap_value,
                               double mu_for_theory = 1.0);
  static StepSchedule classic(double eta0, double mu_for_theory = 1.0);
  static StepSchedule hogwild_growing(double mu, double L, int D,
                                      std::function<double(double)> tau_fn,
                                      double alpha = 12.0);

 private:
  ScheduleFamily family_ = ScheduleFamily::constant;
  double mu_ = 1.0;
  double L_ = 1.0;
  double alpha_ = 2.0;
  double beta_ = 0.0;
  double k_offset_ = 0.0;
  double q_ = 1.0;
  double K_ = 1.0;
  double E_ = 0.0;
  double eta_const_ = 0.0;
  double cap_ = 0.0;
  int D_ = 1;
  AlphaRule rule_ = AlphaRule::constant4;
  std::function<double(double)> tau_fn_;
};

// tau(t) = sqrt(t L(t)) with L(t) = 1/ln t - 1/(ln t)^2, floored at its
// t = 3 value (L(t) needs ln t > 1).
double default_growing_tau(double t);

}  // namespace asgd
