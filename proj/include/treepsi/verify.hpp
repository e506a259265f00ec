#pragma once

// The verification suite behind `treepsi verify`: every invariant that can be
// checked at the configured q, radius and grid, one row per check.

#include <iosfwd>
#include <string>
#include <vector>

#include "treepsi/config.hpp"

namespace treepsi {

struct CheckRow {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CheckRow> rows;

  bool all_pass() const;
  const CheckRow* find(const std::string& name) const;
};

VerifyReport run_verify(const RunConfig& cfg);

void print_report(std::ostream& out, const VerifyReport& report);

}  // namespace treepsi
