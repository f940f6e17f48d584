#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "dtlab/rational.hpp"

namespace dtlab {

enum class Provenance { Exact, PaperClosedForm, MonteCarlo };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Exact:
      return "exact";
    case Provenance::PaperClosedForm:
      return "paper-closed-form";
    case Provenance::MonteCarlo:
      return "monte-carlo";
  }
  return "exact";
}

/// One line of a verification report. Values are kept as text so exact
/// rationals survive as "p/q"; numeric values use %.17g.
struct CheckRecord {
  std::string name;
  std::string expected;
  std::string actual;
  double tolerance = 0.0;
  bool pass = false;
  Provenance provenance = Provenance::Exact;
};

using CheckList = std::vector<CheckRecord>;

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline CheckRecord exact_check(std::string name, const Rational& expected, const Rational& actual) {
  return {std::move(name), to_string(expected), to_string(actual), 0.0, expected == actual, Provenance::Exact};
}

inline bool all_pass(const CheckList& checks) {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

}  // namespace dtlab
