#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dlms {

/// Exit codes: 0 success, 1 bad input (config, file, arguments),
/// 2 runtime guard (e.g. removal-set search too large).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "0,1,3,5" → {0, 1, 3, 5}. Throws Error(Errc::config) on empty or bad input.
std::vector<std::size_t> parse_f_list(const std::string& text);

}  // namespace dlms
