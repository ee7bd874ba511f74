#include "asgd/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace asgd {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ScheduleError(what);
}

double stepped_eta(double mu, double E, double t) {
  double h = std::floor(std::log2(t + E));
  return 4.0 / (mu * std::exp2(h));
}

}  // namespace

double default_growing_tau(double t) {
  auto raw = [](double s) {
    double l = std::log(s);
    return std::sqrt(s * (1.0 / l - 1.0 / (l * l)));
  };
  if (t < 3.0) return raw(3.0);
  return std::max(raw(t), raw(3.0));
}

double StepSchedule::eta_real(double t) const {
  switch (family_) {
    case ScheduleFamily::classic:
      return eta_const_ / (1.0 + t);
    case ScheduleFamily::theorem_sgd:
      return alpha_ / (mu_ * (t + E_));
    case ScheduleFamily::hogwild_expected: {
      double at = alpha_;
      switch (rule_) {
        case AlphaRule::constant4: at = 4.0; break;
        case AlphaRule::constant_alpha: at = alpha_; break;
        case AlphaRule::stepped:
          at = 4.0 * (t + E_) / std::exp2(std::floor(std::log2(t + E_)));
          break;
      }
      return at / (mu_ * (t + E_));
    }
    case ScheduleFamily::hogwild_as:
      return 1.0 / (L_ * D_ * (2.0 + beta_) * (k_offset_ + t));
    case ScheduleFamily::power:
      return std::pow(K_ + t, -q_);
    case ScheduleFamily::stepped:
      return stepped_eta(mu_, E_, t);
    case ScheduleFamily::constant:
      return eta_const_;
    case ScheduleFamily::hogwild_growing:
      return alpha_ / (mu_ * (t + 2.0 * tau_fn_(t)));
  }
  return 0.0;
}

double StepSchedule::tau_at(double t) const {
  return family_ == ScheduleFamily::hogwild_growing ? tau_fn_(t) : 0.0;
}

double StepSchedule::M_of(double t) const {
  switch (family_) {
    case ScheduleFamily::classic:
      return mu_ * eta_const_ * std::log1p(t);
    case ScheduleFamily::theorem_sgd:
      return alpha_ * std::log((t + E_) / E_);
    case ScheduleFamily::hogwild_expected:
      require(rule_ != AlphaRule::stepped,
              "closed-form M needs a constant alpha_t");
      return (rule_ == AlphaRule::constant4 ? 4.0 : alpha_) *
             std::log((t + E_) / E_);
    case ScheduleFamily::hogwild_as: {
      double c = mu_ / (L_ * D_ * (2.0 + beta_));
      return c * std::log((k_offset_ + t) / k_offset_);
    }
    case ScheduleFamily::power:
      if (q_ == 1.0) return mu_ * std::log((K_ + t) / K_);
      return mu_ * (std::pow(K_ + t, 1.0 - q_) - std::pow(K_, 1.0 - q_)) /
             (1.0 - q_);
    case ScheduleFamily::constant:
      return mu_ * eta_const_ * t;
    case ScheduleFamily::stepped:
    case ScheduleFamily::hogwild_growing: {
      // piecewise / non-closed-form families: trapezoid fallback, the
      // theory module uses its own quadrature where precision matters
      double sum = 0.0;
      int steps = 4096;
      double h = t / steps;
      for (int i = 0; i < steps; ++i) {
        double a = i * h, b = a + h;
        sum += 0.5 * (n_of(a) + n_of(b)) * h;
      }
      return sum;
    }
  }
  return 0.0;
}

StepSchedule StepSchedule::theorem_sgd(double mu, double L, double alpha) {
  require(mu > 0 && L >= mu, "theorem_sgd needs 0 < mu <= L");
  require(alpha == 2.0, "theorem_sgd fixes alpha = 2");
  StepSchedule s;
  s.family_ = ScheduleFamily::theorem_sgd;
  s.mu_ = mu;
  s.L_ = L;
  s.alpha_ = alpha;
  s.E_ = 2.0 * alpha * L / mu;
  s.cap_ = 1.0 / (2.0 * L);
  require(s.eta_real(0) <= s.cap_ * (1 + 1e-12), "eta0 exceeds 1/(2L)");
  return s;
}

StepSchedule StepSchedule::hogwild(double mu, double L, int D, double tau,
                                   double alpha, AlphaRule rule) {
  require(mu > 0 && L > 0 && D >= 1 && tau >= 0, "bad hogwild parameters");
  require(alpha >= 4.0, "hogwild needs alpha >= 4");
  StepSchedule s;
  s.family_ = ScheduleFamily::hogwild_expected;
  s.mu_ = mu;
  s.L_ = L;
  s.D_ = D;
  s.alpha_ = alpha;
  s.rule_ = rule;
  s.E_ = std::max(2.0 * tau, 4.0 * L * alpha * D / mu);
  s.cap_ = 1.0 / (4.0 * L * D);
  require(s.eta_real(0) <= s.cap_ * (1 + 1e-12), "eta0 exceeds 1/(4LD)");
  return s;
}

StepSchedule StepSchedule::hogwild_as(double L, int D, double beta,
                                      double k_offset, double tau,
                                      double mu_for_theory) {
  require(L > 0 && D >= 1 && beta > 0, "bad hogwild_as parameters");
  require(k_offset >= 3.0 * tau, "hogwild_as needs k >= 3 tau");
  require(k_offset > 0, "hogwild_as needs k > 0");
  StepSchedule s;
  s.family_ = ScheduleFamily::hogwild_as;
  s.mu_ = mu_for_theory;
  s.L_ = L;
  s.D_ = D;
  s.beta_ = beta;
  s.k_offset_ = k_offset;
  s.cap_ = 1.0 / (4.0 * L * D);
  require(s.eta_real(0) < s.cap_, "eta0 must stay below 1/(4LD)");
  return s;
}

StepSchedule StepSchedule::power(double q, double K, double L,
                                 double mu_for_theory) {
  require(q > 0, "power needs q > 0");
  require(L > 0 && K > 0, "bad power parameters");
  StepSchedule s;
  s.family_ = ScheduleFamily::power;
  s.q_ = q;
  s.K_ = K;
  s.L_ = L;
  s.mu_ = mu_for_theory;
  s.cap_ = 1.0 / (2.0 * L);
  require(s.eta_real(0) <= s.cap_ * (1 + 1e-12),
          "power needs K^q >= 2L so eta0 <= 1/(2L)");
  return s;
}

StepSchedule StepSchedule::stepped(double mu, double E) {
  require(mu > 0 && E >= 1.0, "stepped needs mu > 0 and E >= 1");
  StepSchedule s;
  s.family_ = ScheduleFamily::stepped;
  s.mu_ = mu;
  s.E_ = E;
  s.cap_ = s.eta_real(0);
  return s;
}

StepSchedule StepSchedule::constant(double eta, double cap_value,
                                    double mu_for_theory) {
  require(eta > 0, "constant needs eta > 0");
  require(eta <= cap_value, "eta exceeds cap");
  StepSchedule s;
  s.family_ = ScheduleFamily::constant;
  s.eta_const_ = eta;
  s.cap_ = cap_value;
  s.mu_ = mu_for_theory;
  return s;
}

StepSchedule StepSchedule::classic(double eta0, double mu_for_theory) {
  require(eta0 > 0, "classic needs eta0 > 0");
  StepSchedule s;
  s.family_ = ScheduleFamily::classic;
  s.eta_const_ = eta0;
  s.cap_ = eta0;
  s.mu_ = mu_for_theory;
  return s;
}

StepSchedule StepSchedule::hogwild_growing(double mu, double L, int D,
                                           std::function<double(double)> tau_fn,
                                           double alpha) {
  require(mu > 0 && L > 0 && D >= 1, "bad hogwild_growing parameters");
  require(alpha >= 12.0, "growing-tau mode needs alpha_t >= 12");
  require(static_cast<bool>(tau_fn), "tau_fn required");
  StepSchedule s;
  s.family_ = ScheduleFamily::hogwild_growing;
  s.mu_ = mu;
  s.L_ = L;
  s.D_ = D;
  s.alpha_ = alpha;
  s.tau_fn_ = std::move(tau_fn);
  s.cap_ = s.eta_real(0);
  return s;
}

}  // namespace asgd
