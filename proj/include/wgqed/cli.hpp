// cli.hpp - command-line entry point. Exit codes: 0 success, 1 invalid
// input or usage, 2 numerical failure, 3 failed scenario expectations.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

namespace wgqed {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a (64-bit) of the key-sorted compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wgqed
