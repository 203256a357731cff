#include "doctest.h"

#include <cmath>
#include <complex>
#include <limits>

#include "dcns/errors.hpp"
#include "dcns/resolvent.hpp"
#include "oracles.hpp"

using dcns::DecayRate;
using dcns::GainFunction;
using dcns::ResolventPath;
using dcns::ResolventProblem;

namespace {

std::complex<double> gamma_at(const ResolventPath& path, double t) {
  for (std::size_t i = 0; i < path.times.size(); ++i)
    if (std::abs(path.times[i] - t) < 1e-12) return path.gamma[i];
  REQUIRE(false);
  return {};
}

/// Left side of the transcendental rate equation solved by rho1.
double rate_equation(double rho, std::complex<double> lambda, double tau1, double cbar) {
  const double a2 = std::norm(lambda);
  return 3.0 * rho * a2 * tau1 * tau1 * cbar * cbar * std::exp(rho * cbar * tau1) + 2.0 * rho -
         2.0 * (lambda.real() - a2 * tau1 * cbar);
}

}  // namespace

TEST_CASE("undelayed resolvent reproduces the exponential") {
  ResolventProblem p;
  p.lambda = {1.0, 0.0};
  auto path = dcns::solve_resolvent(p, 0.0, 5.0, 1e-3);
  CHECK(path.times.front() == doctest::Approx(0.0));
  CHECK(path.times.back() == doctest::Approx(5.0));
  for (std::size_t i = 0; i < path.times.size(); i += 100)
    CHECK(std::abs(path.gamma[i] - std::exp(-path.times[i])) < 1e-6);
}

TEST_CASE("undelayed resolvent with decaying gain and complex mode") {
  ResolventProblem p;
  p.lambda = {2.0, 1.0};
  p.gain = GainFunction::power_law(1.0, 1.0);
  auto path = dcns::solve_resolvent(p, 0.0, 8.0, 2e-3);
  // the exact solution is (1 + t)^(-lambda)
  for (double t : {1.0, 3.0, 8.0}) {
    std::complex<double> exact = std::exp(-p.lambda * std::log1p(t));
    CHECK(std::abs(gamma_at(path, t) - exact) < 1e-6);
  }
}

TEST_CASE("delay freezes the resolvent over the first lag") {
  ResolventProblem p;
  p.lambda = {3.0, 0.0};
  p.tau1 = 0.2;
  auto path = dcns::solve_resolvent(p, 0.0, 3.0, 1e-3);
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    if (path.times[i] <= 0.2 + 1e-12)
      CHECK(std::abs(path.gamma[i] - 1.0) < 1e-13);
    else
      CHECK(std::abs(path.gamma[i]) < 1.0);
  }
}

TEST_CASE("integrator converges at fourth order") {
  ResolventProblem p;
  p.lambda = {3.0, 0.0};
  p.tau1 = 0.2;
  auto ref = dcns::solve_resolvent(p, 0.0, 2.0, 1e-3);
  auto coarse = dcns::solve_resolvent(p, 0.0, 2.0, 2e-2);
  auto fine = dcns::solve_resolvent(p, 0.0, 2.0, 1e-2);
  double e_coarse = std::abs(coarse.gamma.back() - ref.gamma.back());
  double e_fine = std::abs(fine.gamma.back() - ref.gamma.back());
  CHECK(e_fine < e_coarse);
  double order = e_coarse / e_fine;
  CHECK(order > 12.0);
  CHECK(order < 20.0);
}

TEST_CASE("decay rates match the closed forms") {
  ResolventProblem p;
  p.lambda = {1.0, 0.0};
  p.tau1 = 0.2;
  DecayRate r = dcns::decay_rate(p);
  CHECK(r.rho2 == doctest::Approx(5.0 * std::log(5.0)).epsilon(1e-12));
  CHECK(std::abs(rate_equation(r.rho1, p.lambda, p.tau1, 1.0)) < 1e-10);
  CHECK(r.rho == doctest::Approx(std::min(r.rho1, r.rho2)));
  CHECK(r.fitted_b >= 1.0);

  p.lambda = {3.0, 0.0};
  r = dcns::decay_rate(p);
  CHECK(r.rho2 == doctest::Approx(5.0 * std::log(5.0 / 3.0)).epsilon(1e-12));
  CHECK(std::abs(rate_equation(r.rho1, p.lambda, p.tau1, 1.0)) < 1e-10);
}

TEST_CASE("zero delay collapses to the exact envelope") {
  ResolventProblem p;
  p.lambda = {2.5, -0.7};
  DecayRate r = dcns::decay_rate(p);
  CHECK(r.rho1 == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::isinf(r.rho2));
  CHECK(r.rho == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(r.fitted_b == doctest::Approx(1.0));
}

TEST_CASE("longer delays certify slower decay") {
  ResolventProblem p;
  p.lambda = {2.0, 0.0};
  p.tau1 = 0.1;
  double fast = dcns::decay_rate(p).rho;
  p.tau1 = 0.3;
  double slow = dcns::decay_rate(p).rho;
  CHECK(fast > slow);
  CHECK(slow > 0.0);
}

TEST_CASE("the small-delay hypothesis is enforced") {
  ResolventProblem p;
  p.lambda = {3.0, 0.0};
  p.tau1 = 0.5;
  CHECK(!p.feasible());
  CHECK(p.feasibility_margin() < 0.0);
  CHECK_THROWS_AS((void)dcns::decay_rate(p), dcns::Infeasible);
}

TEST_CASE("fitted envelope bounds the squared resolvent") {
  ResolventProblem p;
  p.lambda = {3.0, 0.0};
  p.tau1 = 0.2;
  DecayRate r = dcns::decay_rate(p);
  auto check = dcns::verify_envelope(p, r, 12.0);
  CHECK(check.holds);
  CHECK(check.b_fit >= 1.0);

  // the certified envelope really covers the path; the slack absorbs the
  // difference between this fine path and the coarser fitting grid
  auto path = dcns::solve_resolvent(p, 0.0, 12.0, 1e-3);
  for (std::size_t i = 0; i < path.times.size(); i += 50) {
    double lhs = std::norm(path.gamma[i]);
    double rhs = check.b_fit * std::exp(-r.rho * path.times[i]);
    CHECK(lhs <= rhs * (1.0 + 1e-6) + 1e-9);
  }
}

TEST_CASE("envelope certification under a decaying gain") {
  ResolventProblem p;
  p.lambda = {1.0, 0.5};
  p.tau1 = 0.25;
  p.gain = GainFunction::power_law(1.0, 0.6);
  DecayRate r = dcns::decay_rate(p);
  CHECK(r.rho > 0.0);
  auto check = dcns::verify_envelope(p, r, 40.0);
  CHECK(check.holds);

  auto path = dcns::solve_resolvent(p, 0.0, 40.0, 2.5e-3);
  for (std::size_t i = 0; i < path.times.size(); i += 400) {
    double budget = p.gain.integral(0.0, path.times[i]);
    double rhs = check.b_fit * std::exp(-r.rho * budget);
    CHECK(std::norm(path.gamma[i]) <= rhs * (1.0 + 1e-6) + 1e-9);
  }
}

TEST_CASE("solver input validation") {
  ResolventProblem p;
  p.lambda = {1.0, 0.0};
  p.tau1 = 0.2;
  CHECK_THROWS_AS((void)dcns::solve_resolvent(p, 0.0, 1.0, 0.03), dcns::ConfigError);
  CHECK_THROWS_AS((void)dcns::solve_resolvent(p, 0.0, 1.0, -1e-3), dcns::ConfigError);
  CHECK_THROWS_AS((void)dcns::solve_resolvent(p, 1.0, 0.5, 1e-3), dcns::ConfigError);
}
