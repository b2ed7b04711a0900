#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "n2048/network.hpp"
#include "n2048/search.hpp"

namespace n2048 {

struct Summary {
  std::size_t n = 0;
  double mean = 0;
  double sd = 0;    // sample standard deviation
  double ci95 = 0;  // half-width, normal approximation
};

Summary summarize(std::span<const double> values);

struct EvalReport {
  std::vector<GameRecord> games;
  Summary score;
  double pct_32768 = 0;
  double pct_16384 = 0;
  double pct_8192 = 0;
  double moves_per_s = 0;
  double wall_s = 0;
};

// Seed of game i in an evaluation block.
std::uint64_t game_seed(std::uint64_t base_seed, std::uint64_t game);

// Plays games 0..n-1 across OpenMP threads (threads <= 0: OpenMP default).
// Records are in game order and do not depend on the thread count.
EvalReport evaluate_games(const NTupleNetwork& network, const SearchLimit& limit, int n, std::uint64_t base_seed,
                          int threads = 0, std::size_t tt_capacity = kDefaultTtCapacity);

// Single-threaded reference for evaluate_games.
EvalReport evaluate_games_serial(const NTupleNetwork& network, const SearchLimit& limit, int n,
                                 std::uint64_t base_seed, std::size_t tt_capacity = kDefaultTtCapacity);

}  // namespace n2048
