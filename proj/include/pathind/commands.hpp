#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pathind {

inline const std::vector<std::string> kCommands = {
    "simulate",      "verify",         "kpz-solve",
    "burgers-check", "gradient-check", "martingale-check"};

struct CommandOptions {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<std::string> expect;  // "independent" or "dependent"
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

// Exit status: 0 success, 2 quantitative failure, 1 error. Errors are
// reported on `err` as a single JSON line {"error": kind, "message": ...}.
int run_command(const CommandOptions& options, std::ostream& out,
                std::ostream& err);

}  // namespace pathind
