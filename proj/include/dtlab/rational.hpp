#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dtlab {

using Rational = mpq_class;

/// Raised when a numerical procedure cannot deliver the precision it was
/// asked for (sparse profiles, too few decades, ...). The CLI maps it to
/// exit code 3.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "p/q", "p" or "-p/q". Whitespace is not accepted. The result is
/// canonicalized; q == 0 throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form, always with an explicit denominator ("3/1", "0/1").
std::string to_string(const Rational& q);

/// Exact square root when q is the square of a rational, otherwise nullopt.
std::optional<Rational> rational_sqrt(const Rational& q);

double to_double(const Rational& q);

}  // namespace dtlab
