#pragma once

#include <stdexcept>
#include <string>

namespace dcns {

/// Bad user input: malformed values, misaligned delays, out-of-range params.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed text input; carries 1-based line and column of the offence.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line_, int col_ = 0)
      : std::runtime_error(msg + " (line " + std::to_string(line_) +
                           (col_ > 0 ? ", col " + std::to_string(col_) : std::string()) + ")"),
        line(line_),
        col(col_) {}
  int line;
  int col;
};

/// Eigensolver could not separate the structural zero eigenvalue.
struct DegenerateSpectrum : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoSpanningTree : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphNotUndirected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphNotConnected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested feedback gain lies outside the admissible interval.
struct GainOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Delay/gain combination violates the contraction prerequisite.
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A delayed lookup needs more history than the supplied window holds.
struct HistoryUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A noise intensity exceeded its declared linear growth bound.
struct LinearBoundViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownScenario : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dcns
