#include "n2048/stats.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>

namespace n2048 {

namespace {

EvalReport finish_report(std::vector<GameRecord> games, double wall_s) {
  EvalReport r;
  r.games = std::move(games);
  r.wall_s = wall_s;
  std::vector<double> scores;
  std::uint64_t moves = 0;
  double move_ms = 0;
  for (const auto& g : r.games) {
    scores.push_back(static_cast<double>(g.score));
    moves += g.moves;
    move_ms += g.ms_per_move * static_cast<double>(g.moves);
    r.pct_32768 += g.max_tile >= 32768 ? 1 : 0;
    r.pct_16384 += g.max_tile >= 16384 ? 1 : 0;
    r.pct_8192 += g.max_tile >= 8192 ? 1 : 0;
  }
  r.score = summarize(scores);
  if (!r.games.empty()) {
    const double n = static_cast<double>(r.games.size());
    r.pct_32768 *= 100.0 / n;
    r.pct_16384 *= 100.0 / n;
    r.pct_8192 *= 100.0 / n;
  }
  // Per-worker rate: moves over the time spent choosing and making them.
  r.moves_per_s = move_ms > 0 ? static_cast<double>(moves) / (move_ms / 1000.0) : 0.0;
  return r;
}

}  // namespace

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.ci95 = 1.96 * s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

std::uint64_t game_seed(std::uint64_t base_seed, std::uint64_t game) {
  std::uint64_t x = base_seed * 0x9E3779B97F4A7C15ULL + game + 1;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

EvalReport evaluate_games(const NTupleNetwork& network, const SearchLimit& limit, int n, std::uint64_t base_seed,
                          int threads, std::size_t tt_capacity) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<GameRecord> games(static_cast<std::size_t>(n > 0 ? n : 0));
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (int i = 0; i < n; ++i) {
    games[static_cast<std::size_t>(i)] =
        play_game(network, limit, game_seed(base_seed, static_cast<std::uint64_t>(i)), tt_capacity);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return finish_report(std::move(games), wall);
}

EvalReport evaluate_games_serial(const NTupleNetwork& network, const SearchLimit& limit, int n,
                                 std::uint64_t base_seed, std::size_t tt_capacity) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<GameRecord> games;
  for (int i = 0; i < n; ++i) {
    games.push_back(play_game(network, limit, game_seed(base_seed, static_cast<std::uint64_t>(i)), tt_capacity));
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return finish_report(std::move(games), wall);
}

}  // namespace n2048
