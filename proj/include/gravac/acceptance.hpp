#pragma once

#include <iosfwd>

namespace gravac {

// Runs the oracle/property acceptance battery, printing one PASS/FAIL line
// per criterion. Returns the number of failed criteria.
int run_acceptance(std::ostream& out);

}  // namespace gravac
