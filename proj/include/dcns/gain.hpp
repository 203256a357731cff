#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dcns/errors.hpp"

namespace dcns {

enum class Verdict { Holds, Fails, Inconclusive };

[[nodiscard]] const char* to_string(Verdict v);

/// Decaying gain c(t) on [0, inf); families: Constant k, PowerLaw a/(1+t)^beta,
/// LogInverse 1/log(s+t), Tabulated piecewise-linear samples.
class GainFunction {
 public:
  enum class Family { Constant, PowerLaw, LogInverse, Tabulated };

  static GainFunction constant(double k);
  static GainFunction power_law(double a, double beta);
  static GainFunction log_inverse(double s);
  static GainFunction tabulated(std::vector<double> ts, std::vector<double> cs);

  /// Accepts "const:k=0.12", "power:a=1,beta=0.5", "loginv:s=4", "table:<path>".
  static GainFunction parse(const std::string& spec);

  [[nodiscard]] double operator()(double t) const;

  /// sup of c over [t0, inf); grid maximum for tabulated gains.
  [[nodiscard]] double tail_sup(double t0) const;

  /// Integral of c over [t0, t1]; closed form where the family allows it.
  [[nodiscard]] double integral(double t0, double t1) const;

  /// Integral of c^2 over [t0, t1].
  [[nodiscard]] double square_integral(double t0, double t1) const;

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] double grid_end() const;  // +inf for parametric families
  [[nodiscard]] std::string describe() const;

  // family parameters (meaningful per family)
  double a = 0, beta = 0, k = 0, s = 0;

 private:
  GainFunction() = default;
  Family family_ = Family::Constant;
  std::vector<double> grid_t_, grid_c_;
  friend struct GainAccess;
};

/// Verdicts for the persistence/decay conditions on a gain.
///   c1: integral of c diverges            c2: integral of c^2 converges
///   c3: c(t) -> 0                         c4/c4prime: weighted tail integral -> 0
///   c5: c(t) * log(integral of c) -> 0    c5prime: same with liminf
struct ConditionReport {
  Verdict c1 = Verdict::Inconclusive;
  Verdict c2 = Verdict::Inconclusive;
  Verdict c3 = Verdict::Inconclusive;
  Verdict c4 = Verdict::Inconclusive;
  Verdict c4prime = Verdict::Inconclusive;
  Verdict c5 = Verdict::Inconclusive;
  Verdict c5prime = Verdict::Inconclusive;
  /// Limit of c(t)*log(integral c) when known (0, a positive value, or inf).
  double c5_limit = std::numeric_limits<double>::quiet_NaN();
};

/// rate feeds c4 (a decay exponent rho0), rate_prime feeds c4prime (2*lambda_bar).
/// Parametric families get exact verdicts; tabulated gains get trend-based
/// verdicts that may be Inconclusive but never contradict the exact ones.
[[nodiscard]] ConditionReport check_conditions(const GainFunction& c,
                                               std::optional<double> rate = std::nullopt,
                                               std::optional<double> rate_prime = std::nullopt);

}  // namespace dcns
