#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mconc::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kNumerical = 3 };

inline constexpr const char* kVersion = "1.0.0";

// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// strict 1e-10, default 1e-8, loose 1e-6.
double tolerance_for_profile(const std::string& profile);

// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

// "lo..hi" or a single integer.
std::pair<long, long> parse_range(const std::string& text);

}  // namespace mconc::cli
