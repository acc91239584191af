#pragma once

#include <iosfwd>

namespace iclab::tools {

// Fast invariant checks (seconds). Prints one PASS/FAIL line per check and
// returns true when every check passes.
bool run_selftest(std::ostream& os);

}  // namespace iclab::tools
