#include "dcns/gain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace dcns {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_number(const std::string& txt, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(txt, &used);
  } catch (...) {
    throw ConfigError("bad number for " + what + ": '" + txt + "'");
  }
  if (used != txt.size()) throw ConfigError("trailing junk in " + what + ": '" + txt + "'");
  return v;
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double m, double b,
                            double fa, double fm, double fb, double whole, double eps, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, m, fa, flm, fm);
  double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, eps * 0.5, depth - 1) +
         adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, eps * 0.5, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps) {
  if (b <= a) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson_rec(f, a, m, b, fa, fm, fb, simpson(a, b, fa, fm, fb), eps, 48);
}

enum class ConvClass { Divergent, Convergent, Unclear };

// Classifies whether F(t) diverges as t grows, from values at T/8..T.
ConvClass classify_integral(double f1, double f2, double f3, double f4) {
  double d1 = f2 - f1, d2 = f3 - f2, d3 = f4 - f3;
  if (d3 <= 1e-12 * std::max(std::abs(f4), 1.0)) return ConvClass::Convergent;
  if (d2 <= 0.0 || d1 <= 0.0) return ConvClass::Unclear;
  double r2 = d3 / d2;
  if (r2 >= 0.95) return ConvClass::Divergent;
  if (r2 <= 0.75) {
    double r1 = d2 / d1;
    if (r1 >= 0.999) return ConvClass::Unclear;
    double est1 = f4 + d3 * r2 / (1.0 - r2);
    double est0 = f3 + d2 * r1 / (1.0 - r1);
    if (std::abs(est1 - est0) <= 0.05 * std::max(std::abs(est1), 1e-300))
      return ConvClass::Convergent;
  }
  return ConvClass::Unclear;
}

// Does the sampled sequence x(T/4), x(T/2), x(T) tend to zero?  Aitken-style
// limit estimate; lim_out receives the estimate when a verdict is reached.
Verdict classify_limit_zero(double x1, double x2, double x3, double* lim_out = nullptr) {
  double ref = std::max({std::abs(x1), std::abs(x2), std::abs(x3)});
  if (lim_out) *lim_out = std::numeric_limits<double>::quiet_NaN();
  if (ref <= 1e-9) {
    if (lim_out) *lim_out = 0.0;
    return Verdict::Holds;
  }
  double d1 = x2 - x1, d2 = x3 - x2;
  if (std::abs(d2) <= 1e-9 * std::max(ref, 1.0)) {
    // flat tail: the limit is x3 itself
    if (lim_out) *lim_out = x3;
    return std::abs(x3) <= 1e-6 * std::max(ref, 1.0) ? Verdict::Holds : Verdict::Fails;
  }
  double denom = d2 - d1;
  if (std::abs(denom) <= 1e-12 * ref || d1 == 0.0) return Verdict::Inconclusive;
  double lhat = x3 - d2 * d2 / denom;
  if (std::abs(lhat) <= 0.08 * ref + 1e-9) {
    if (lim_out) *lim_out = 0.0;
    return Verdict::Holds;
  }
  double r = d2 / d1;
  if (std::abs(lhat) >= 0.9 * std::abs(x3) && r >= 0.0 && r <= 0.6) {
    if (lim_out) *lim_out = lhat;
    return Verdict::Fails;
  }
  return Verdict::Inconclusive;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    default: return "inconclusive";
  }
}

GainFunction GainFunction::constant(double k) {
  if (!(k > 0) || !std::isfinite(k)) throw ConfigError("constant gain needs k > 0");
  GainFunction g;
  g.family_ = Family::Constant;
  g.k = k;
  return g;
}

GainFunction GainFunction::power_law(double a, double beta) {
  if (!(a > 0) || !std::isfinite(a)) throw ConfigError("power gain needs a > 0");
  if (!(beta >= 0) || !std::isfinite(beta)) throw ConfigError("power gain needs beta >= 0");
  GainFunction g;
  g.family_ = Family::PowerLaw;
  g.a = a;
  g.beta = beta;
  return g;
}

GainFunction GainFunction::log_inverse(double s) {
  if (!(s > 1) || !std::isfinite(s)) throw ConfigError("loginv gain needs s > 1");
  GainFunction g;
  g.family_ = Family::LogInverse;
  g.s = s;
  return g;
}

GainFunction GainFunction::tabulated(std::vector<double> ts, std::vector<double> cs) {
  if (ts.size() != cs.size() || ts.size() < 2) throw ConfigError("tabulated gain needs >= 2 samples");
  if (ts.front() != 0.0) throw ConfigError("tabulated gain must start at t = 0");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!std::isfinite(ts[i]) || !std::isfinite(cs[i]) || cs[i] < 0)
      throw ConfigError("tabulated gain samples must be finite and nonnegative");
    if (i > 0 && ts[i] <= ts[i - 1]) throw ConfigError("tabulated gain times must increase");
  }
  GainFunction g;
  g.family_ = Family::Tabulated;
  g.grid_t_ = std::move(ts);
  g.grid_c_ = std::move(cs);
  return g;
}

GainFunction GainFunction::parse(const std::string& spec) {
  auto colon = spec.find(':');
  std::string fam = spec.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto kv = [&rest]() {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("gain spec expects key=value: '" + item + "'");
      out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
  };
  if (fam == "const") {
    double k = kInf;
    for (auto& [key, val] : kv()) {
      if (key == "k") k = parse_number(val, "k");
      else throw ConfigError("unknown const gain key: " + key);
    }
    if (!std::isfinite(k)) throw ConfigError("const gain needs k=");
    return constant(k);
  }
  if (fam == "power") {
    double a = kInf, beta = kInf;
    for (auto& [key, val] : kv()) {
      if (key == "a") a = parse_number(val, "a");
      else if (key == "beta") beta = parse_number(val, "beta");
      else throw ConfigError("unknown power gain key: " + key);
    }
    if (!std::isfinite(a) || !std::isfinite(beta)) throw ConfigError("power gain needs a= and beta=");
    return power_law(a, beta);
  }
  if (fam == "loginv") {
    double s = kInf;
    for (auto& [key, val] : kv()) {
      if (key == "s") s = parse_number(val, "s");
      else throw ConfigError("unknown loginv gain key: " + key);
    }
    if (!std::isfinite(s)) throw ConfigError("loginv gain needs s=");
    return log_inverse(s);
  }
  if (fam == "table") {
    if (rest.empty()) throw ConfigError("table gain needs a file path");
    std::ifstream in(rest);
    if (!in) throw ConfigError("cannot open gain table: " + rest);
    std::vector<double> ts, cs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      double t, c;
      if (!(ls >> t)) continue;
      if (!(ls >> c)) throw ParseError("gain table line needs 't c'", line_no);
      ts.push_back(t);
      cs.push_back(c);
    }
    return tabulated(std::move(ts), std::move(cs));
  }
  throw ConfigError("unknown gain family: '" + fam + "'");
}

double GainFunction::operator()(double t) const {
  if (t < 0 || !std::isfinite(t)) throw ConfigError("gain evaluated at invalid time");
  switch (family_) {
    case Family::Constant: return k;
    case Family::PowerLaw: return a * std::pow(1.0 + t, -beta);
    case Family::LogInverse: return 1.0 / std::log(s + t);
    case Family::Tabulated: {
      if (t > grid_t_.back() * (1.0 + 1e-12))
        throw ConfigError("tabulated gain evaluated beyond its grid");
      if (t >= grid_t_.back()) return grid_c_.back();
      auto it = std::upper_bound(grid_t_.begin(), grid_t_.end(), t);
      std::size_t hi = static_cast<std::size_t>(it - grid_t_.begin());
      std::size_t lo = hi - 1;
      double w = (t - grid_t_[lo]) / (grid_t_[hi] - grid_t_[lo]);
      return grid_c_[lo] + w * (grid_c_[hi] - grid_c_[lo]);
    }
  }
  return 0;
}

double GainFunction::tail_sup(double t0) const {
  if (t0 < 0) throw ConfigError("tail_sup needs t0 >= 0");
  switch (family_) {
    case Family::Constant: return k;
    case Family::PowerLaw: return beta == 0.0 ? a : (*this)(t0);  // nonincreasing for beta > 0
    case Family::LogInverse: return (*this)(t0);
    case Family::Tabulated: {
      double best = (*this)(std::min(t0, grid_t_.back()));
      for (std::size_t i = 0; i < grid_t_.size(); ++i)
        if (grid_t_[i] >= t0) best = std::max(best, grid_c_[i]);
      return best;
    }
  }
  return 0;
}

double GainFunction::grid_end() const {
  return family_ == Family::Tabulated ? grid_t_.back() : kInf;
}

double GainFunction::integral(double t0, double t1) const {
  if (t0 < 0 || t1 < t0) throw ConfigError("bad integration interval for gain");
  switch (family_) {
    case Family::Constant: return k * (t1 - t0);
    case Family::PowerLaw:
      if (beta == 1.0) return a * std::log((1.0 + t1) / (1.0 + t0));
      return a * (std::pow(1.0 + t1, 1.0 - beta) - std::pow(1.0 + t0, 1.0 - beta)) / (1.0 - beta);
    case Family::LogInverse:
      return adaptive_simpson([this](double u) { return 1.0 / std::log(s + u); }, t0, t1, 1e-12);
    case Family::Tabulated: {
      if (t1 > grid_t_.back() * (1.0 + 1e-12))
        throw ConfigError("tabulated gain integrated beyond its grid");
      double sum = 0.0;
      for (std::size_t seg = 0; seg + 1 < grid_t_.size(); ++seg) {
        double lo = std::max(t0, grid_t_[seg]);
        double hi = std::min(t1, grid_t_[seg + 1]);
        if (hi <= lo) continue;
        sum += 0.5 * ((*this)(lo) + (*this)(hi)) * (hi - lo);  // exact for linear segments
      }
      return sum;
    }
  }
  return 0;
}

double GainFunction::square_integral(double t0, double t1) const {
  if (t0 < 0 || t1 < t0) throw ConfigError("bad integration interval for gain");
  switch (family_) {
    case Family::Constant: return k * k * (t1 - t0);
    case Family::PowerLaw:
      if (beta == 0.5) return a * a * std::log((1.0 + t1) / (1.0 + t0));
      return a * a *
             (std::pow(1.0 + t1, 1.0 - 2.0 * beta) - std::pow(1.0 + t0, 1.0 - 2.0 * beta)) /
             (1.0 - 2.0 * beta);
    case Family::LogInverse:
      return adaptive_simpson(
          [this](double u) {
            double l = std::log(s + u);
            return 1.0 / (l * l);
          },
          t0, t1, 1e-12);
    case Family::Tabulated: {
      if (t1 > grid_t_.back() * (1.0 + 1e-12))
        throw ConfigError("tabulated gain integrated beyond its grid");
      double sum = 0.0;
      for (std::size_t seg = 0; seg + 1 < grid_t_.size(); ++seg) {
        double lo = std::max(t0, grid_t_[seg]);
        double hi = std::min(t1, grid_t_[seg + 1]);
        if (hi <= lo) continue;
        double cl = (*this)(lo), ch = (*this)(hi);
        // exact integral of the squared linear interpolant
        sum += (hi - lo) * (cl * cl + cl * ch + ch * ch) / 3.0;
      }
      return sum;
    }
  }
  return 0;
}

std::string GainFunction::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::Constant: os << "const(k=" << k << ")"; break;
    case Family::PowerLaw: os << "power(a=" << a << ",beta=" << beta << ")"; break;
    case Family::LogInverse: os << "loginv(s=" << s << ")"; break;
    case Family::Tabulated:
      os << "table(" << grid_t_.size() << " samples, end=" << grid_t_.back() << ")";
      break;
  }
  return os.str();
}

namespace {

// Weighted tail integral I(t) = int_0^t exp(-rate*(F(t)-F(s))) c(s)^2 ds on a
// tabulated grid, accumulated backwards so the exponent never overflows.
double weighted_tail_integral(const GainFunction& g, const std::vector<double>& knots, double t,
                              double rate) {
  double f_t = g.integral(0.0, t);
  double sum = 0.0;
  double prev = t;
  for (auto it = knots.rbegin(); it != knots.rend(); ++it) {
    double s_lo = *it;
    if (s_lo >= prev) continue;
    double e_hi = -rate * (f_t - g.integral(0.0, prev));
    double e_lo = -rate * (f_t - g.integral(0.0, s_lo));
    double c_hi = g(prev), c_lo = g(s_lo);
    sum += 0.5 * (std::exp(e_hi) * c_hi * c_hi + std::exp(e_lo) * c_lo * c_lo) * (prev - s_lo);
    prev = s_lo;
    if (e_lo < -50.0) break;  // earlier contributions are smaller still
  }
  return sum;
}

Verdict tabulated_c4(const GainFunction& g, double rate) {
  if (g.grid_end() < 1e4) return Verdict::Inconclusive;
  // evaluation knots: the decision times plus a refinement ladder below each
  std::vector<double> knots;
  for (double t = 0.0; t <= 1e4; t += 12.5) knots.push_back(t);
  std::vector<double> vals;
  for (double t : {1e2, 1e3, 1e4}) vals.push_back(weighted_tail_integral(g, knots, t, rate));
  double v0 = vals[0], v1 = vals[1], v2 = vals[2];
  if (v2 < 1e-3 && v1 < v0 && v2 < v1) return Verdict::Holds;
  if (v2 >= 1e-3 && v2 >= 0.999 * v1) return Verdict::Fails;  // stopped decreasing above threshold
  if (v1 > 1.001 * v0 && v2 > 1.001 * v1) return Verdict::Fails;
  return Verdict::Inconclusive;
}

}  // namespace

ConditionReport check_conditions(const GainFunction& c, std::optional<double> rate,
                                 std::optional<double> rate_prime) {
  if (rate && !(*rate > 0)) throw ConfigError("condition check rate must be > 0");
  if (rate_prime && !(*rate_prime > 0)) throw ConfigError("condition check rate must be > 0");
  ConditionReport r;
  switch (c.family()) {
    case GainFunction::Family::Constant:
      r.c1 = Verdict::Holds;
      r.c2 = Verdict::Fails;
      r.c3 = Verdict::Fails;
      r.c4 = r.c4prime = Verdict::Fails;
      r.c5 = r.c5prime = Verdict::Fails;
      r.c5_limit = kInf;
      return r;
    case GainFunction::Family::PowerLaw: {
      bool div = c.beta <= 1.0;   // integral of c diverges
      bool sq = c.beta > 0.5;     // integral of c^2 converges
      bool van = c.beta > 0.0;    // c vanishes
      r.c1 = div ? Verdict::Holds : Verdict::Fails;
      r.c2 = sq ? Verdict::Holds : Verdict::Fails;
      r.c3 = van ? Verdict::Holds : Verdict::Fails;
      // the attenuated tail integral vanishes exactly when the gain both
      // vanishes and keeps infinite total mass, for any positive rate
      r.c4 = r.c4prime = (div && van) ? Verdict::Holds : Verdict::Fails;
      r.c5 = r.c5prime = van ? Verdict::Holds : Verdict::Fails;
      r.c5_limit = van ? 0.0 : kInf;
      return r;
    }
    case GainFunction::Family::LogInverse:
      r.c1 = Verdict::Holds;
      r.c2 = Verdict::Fails;
      r.c3 = Verdict::Holds;
      r.c4 = r.c4prime = Verdict::Holds;
      r.c5 = r.c5prime = Verdict::Fails;
      r.c5_limit = 1.0;  // c * log(integral c) -> 1 for this family
      return r;
    case GainFunction::Family::Tabulated: break;
  }

  // trend-based verdicts on the tabulated grid
  double T = c.grid_end();
  if (T < 16.0) return r;  // grid too short for any trend call
  double f8 = c.integral(0.0, T / 8), f4 = c.integral(0.0, T / 4), f2 = c.integral(0.0, T / 2),
         f1 = c.integral(0.0, T);
  switch (classify_integral(f8, f4, f2, f1)) {
    case ConvClass::Divergent: r.c1 = Verdict::Holds; break;
    case ConvClass::Convergent: r.c1 = Verdict::Fails; break;
    default: break;
  }
  double q8 = c.square_integral(0.0, T / 8), q4 = c.square_integral(0.0, T / 4),
         q2 = c.square_integral(0.0, T / 2), q1 = c.square_integral(0.0, T);
  switch (classify_integral(q8, q4, q2, q1)) {
    case ConvClass::Divergent: r.c2 = Verdict::Fails; break;
    case ConvClass::Convergent: r.c2 = Verdict::Holds; break;
    default: break;
  }
  r.c3 = classify_limit_zero(c(T / 4), c(T / 2), c(T));
  if (f4 > 1.5) {
    double lim = std::numeric_limits<double>::quiet_NaN();
    r.c5 = classify_limit_zero(c(T / 4) * std::log(f4), c(T / 2) * std::log(f2),
                               c(T) * std::log(f1), &lim);
    r.c5prime = r.c5;
    r.c5_limit = lim;
  }
  if (rate) r.c4 = tabulated_c4(c, *rate);
  if (rate_prime) r.c4prime = tabulated_c4(c, *rate_prime);
  return r;
}

}  // namespace dcns
