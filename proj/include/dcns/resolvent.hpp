#pragma once

#include <complex>
#include <vector>

#include "dcns/gain.hpp"

namespace dcns {

/// Scalar delayed resolvent d/dt G(t,s) = -lambda c(t) G(t - tau1, s) with
/// G(s,s) = 1 and G(u,s) = 0 for u < s; lambda is one Laplacian mode.
struct ResolventProblem {
  std::complex<double> lambda;
  GainFunction gain = GainFunction::constant(1.0);
  double tau1 = 0;
  double t0 = 0;  // tail start; the gain bound below is taken from here on

  [[nodiscard]] double gain_bound() const { return gain.tail_sup(t0); }
  /// Small-delay hypothesis tau1 * cbar * |lambda|^2 / Re(lambda) < 1.
  [[nodiscard]] bool feasible() const;
  /// Margin 1 - tau1 * cbar * |lambda|^2 / Re(lambda); positive iff feasible.
  [[nodiscard]] double feasibility_margin() const;
};

/// Exponential envelope data for |G(t,s)|^2 <= b * exp(-rho * int_s^t c).
struct DecayRate {
  double rho1 = 0;      // root of the transcendental rate equation
  double rho2 = 0;      // closed-form log rate
  double rho = 0;       // min(rho1, rho2)
  double fitted_b = 0;  // envelope constant fitted on a default horizon
};

struct ResolventPath {
  std::vector<double> times;
  std::vector<std::complex<double>> gamma;
};

struct EnvelopeCheck {
  double b_fit = 0;
  bool holds = false;
};

/// Integrates the delayed resolvent on [s, t_end]; dt must divide tau1.
/// Fourth-order steps with cubic Hermite lookups at the delayed argument.
[[nodiscard]] ResolventPath solve_resolvent(const ResolventProblem& p, double s, double t_end,
                                            double dt);

/// rho1 by bracketed bisection, rho2 in closed form, b by envelope fitting.
/// tau1 = 0 collapses to the exact undelayed envelope rho = 2 Re(lambda), b = 1.
[[nodiscard]] DecayRate decay_rate(const ResolventProblem& p);

/// Fits b = max |G|^2 exp(+rho int c) on [t0, horizon] and checks that the
/// fitted envelope stops growing after a burn-in window.
[[nodiscard]] EnvelopeCheck verify_envelope(const ResolventProblem& p, const DecayRate& rate,
                                            double horizon);

}  // namespace dcns
