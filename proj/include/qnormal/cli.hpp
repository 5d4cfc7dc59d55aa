#pragma once

#include <iosfwd>

namespace qnormal::cli {

// Exit codes of the qnorm tool.
inline constexpr int kOk = 0;
inline constexpr int kVerifyFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kNumerical = 3;

inline constexpr const char* kVersion = "0.1.0";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qnormal::cli
