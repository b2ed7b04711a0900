#pragma once

// Fully resolved run description, serialisable as flat key=value text.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "n2048/learning.hpp"

namespace n2048 {

struct TrainBudget {
  std::uint64_t total_actions = 100'000'000;
  std::uint64_t eval_every = 10'000'000;  // 0 disables evaluation ticks
  int eval_games_1ply = 1000;
  int eval_games_3ply = 300;
  int workers = 1;
};

struct RunConfig {
  std::string arch = "42-33";
  LearningConfig learning{};
  TrainBudget budget{};
  std::uint64_t seed = 1;
  std::string out;

  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError for unknown keys or unparsable values.
void set_option(RunConfig& config, std::string_view key, std::string_view value);
std::string to_kv(const RunConfig& config);
// Lines of key=value; blank lines and '#' comments are skipped. Values are
// applied on top of `base`.
RunConfig parse_kv(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace n2048
