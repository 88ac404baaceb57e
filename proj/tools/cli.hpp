#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tracepred::cli {

/// Exit codes: 0 no findings / success, 1 findings / violation, 2 error.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace tracepred::cli
