#pragma once

// Expectimax over afterstate values with a transposition table, in
// fixed-depth or per-move time-budget (iterative deepening) mode.
//
// k-ply counts max layers: 1-ply is the greedy policy, each extra ply adds
// one chance layer and one max layer.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "n2048/board.hpp"
#include "n2048/network.hpp"

namespace n2048 {

struct SearchLimit {
  enum class Mode { Depth, Time };
  Mode mode = Mode::Depth;
  int depth = 1;
  double time_ms = 0;

  static SearchLimit plies(int depth);
  static SearchLimit millis(double ms);
};

// Direct-mapped cache from (afterstate, remaining depth) to value;
// a store replaces whatever occupies the slot.
class TranspositionTable {
 public:
  // Capacity is rounded up to a power of two; 0 disables the table.
  explicit TranspositionTable(std::size_t capacity);

  struct Entry {
    double value = 0;
    bool exhaustive = false;  // subtree reached only terminal boards
  };

  std::optional<Entry> find(Board afterstate, int depth) const;
  void store(Board afterstate, int depth, double value, bool exhaustive = false);
  void clear();
  std::size_t capacity() const { return slots_.size(); }
  std::size_t occupied() const;

 private:
  struct Slot {
    std::uint64_t board = 0;
    std::int32_t depth = -1;
    bool exhaustive = false;
    double value = 0;
  };
  std::size_t slot_of(Board afterstate, int depth) const;

  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
};

struct SearchStats {
  std::uint64_t chance_nodes = 0;
  std::uint64_t leaf_evaluations = 0;
  std::uint64_t tt_hits = 0;
  double max_mass_error = 0;  // |sum of chance probabilities - 1|
  int completed_depth = 0;    // last fully searched depth of the last choose_move
};

struct MoveChoice {
  Move move = Move::Up;
  double value = 0;
  int depth = 0;
};

inline constexpr std::size_t kDefaultTtCapacity = std::size_t{1} << 18;

// Single-worker search context; separate instances run concurrently.
class Searcher {
 public:
  explicit Searcher(const NTupleNetwork& network, std::size_t tt_capacity = kDefaultTtCapacity);

  // depth 0 (or a full board) is V(afterstate); otherwise the 0.9/0.1
  // spawn average over empty cells of the best reward + child value, with
  // a spawn that leaves no legal move contributing 0.
  double expectimax_value(Board afterstate, int depth);

  // Throws std::logic_error for a terminal state.
  MoveChoice choose_move(Board state, const SearchLimit& limit);

  const SearchStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }
  TranspositionTable& table() { return tt_; }

  // Upper bound on iterative deepening.
  static constexpr int kMaxDepth = 32;

 private:
  struct Aborted {};

  double value_at(Board afterstate, int depth);
  std::optional<MoveChoice> search_root(Board state, int depth);

  const NTupleNetwork& network_;
  TranspositionTable tt_;
  SearchStats stats_;
  bool timed_ = false;
  std::chrono::steady_clock::time_point deadline_;
  std::uint64_t until_clock_check_ = 0;
  std::uint64_t cutoffs_ = 0;  // depth-0 leaves on non-terminal boards in this iteration
};

struct GameRecord {
  std::uint64_t seed = 0;
  std::uint64_t score = 0;
  std::uint32_t max_tile = 0;
  std::uint64_t moves = 0;
  double ms_per_move = 0;
};

// Full game from initial_state under `limit`; all randomness from `seed`.
GameRecord play_game(const NTupleNetwork& network, const SearchLimit& limit, std::uint64_t seed,
                     std::size_t tt_capacity = kDefaultTtCapacity);

// Deterministic columns only; timing is left out so equal seeds give equal rows.
std::string csv_header();
std::string to_csv(const GameRecord& r);

}  // namespace n2048
