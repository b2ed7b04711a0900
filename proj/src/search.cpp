#include "n2048/search.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace n2048 {

namespace {

constexpr std::uint64_t kNodesPerClockCheck = 256;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// (exponent, probability) of a spawned tile.
constexpr std::array<std::pair<int, double>, 2> kSpawns = {{{1, 0.9}, {2, 0.1}}};

}  // namespace

SearchLimit SearchLimit::plies(int depth) {
  if (depth < 1) throw std::invalid_argument("search depth must be >= 1");
  return {Mode::Depth, depth, 0};
}

SearchLimit SearchLimit::millis(double ms) {
  if (!(ms > 0)) throw std::invalid_argument("time budget must be positive");
  return {Mode::Time, 1, ms};
}

TranspositionTable::TranspositionTable(std::size_t capacity) {
  if (capacity == 0) return;
  slots_.resize(std::bit_ceil(capacity));
  mask_ = slots_.size() - 1;
}

std::size_t TranspositionTable::slot_of(Board afterstate, int depth) const {
  return static_cast<std::size_t>(mix(afterstate.bits() ^ (static_cast<std::uint64_t>(depth) << 58))) & mask_;
}

std::optional<TranspositionTable::Entry> TranspositionTable::find(Board afterstate, int depth) const {
  if (slots_.empty()) return std::nullopt;
  const auto& s = slots_[slot_of(afterstate, depth)];
  if (s.depth == depth && s.board == afterstate.bits()) return Entry{s.value, s.exhaustive};
  return std::nullopt;
}

void TranspositionTable::store(Board afterstate, int depth, double value, bool exhaustive) {
  if (slots_.empty()) return;
  slots_[slot_of(afterstate, depth)] = {afterstate.bits(), depth, exhaustive, value};
}

void TranspositionTable::clear() {
  for (auto& s : slots_) s = Slot{};
}

std::size_t TranspositionTable::occupied() const {
  std::size_t n = 0;
  for (const auto& s : slots_) n += s.depth >= 0 ? 1 : 0;
  return n;
}

Searcher::Searcher(const NTupleNetwork& network, std::size_t tt_capacity) : network_(network), tt_(tt_capacity) {}

double Searcher::expectimax_value(Board afterstate, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  timed_ = false;
  return value_at(afterstate, depth);
}

double Searcher::value_at(Board afterstate, int depth) {
  const int empties = afterstate.empty_count();
  if (depth == 0 || empties == 0) {
    ++stats_.leaf_evaluations;
    ++cutoffs_;
    return network_.evaluate(afterstate);
  }
  if (auto hit = tt_.find(afterstate, depth)) {
    ++stats_.tt_hits;
    if (!hit->exhaustive) ++cutoffs_;
    return hit->value;
  }
  if (timed_ && --until_clock_check_ == 0) {
    until_clock_check_ = kNodesPerClockCheck;
    if (std::chrono::steady_clock::now() >= deadline_) throw Aborted{};
  }
  ++stats_.chance_nodes;
  const std::uint64_t cutoffs_before = cutoffs_;

  const double cell_weight = 1.0 / empties;
  double sum = 0;
  double mass = 0;
  for (int c = 0; c < 16; ++c) {
    if (afterstate.cell(c) != 0) continue;
    for (const auto& [exponent, p] : kSpawns) {
      const Board child = afterstate.with_cell(c, exponent);
      double best = 0;
      bool any = false;
      for (Move m : kMoves) {
        const auto out = slide(child, m);
        if (!out.legal) continue;
        const double v = out.reward + value_at(out.afterstate, depth - 1);
        if (!any || v > best) best = v;
        any = true;
      }
      sum += p * cell_weight * best;
      mass += p * cell_weight;
    }
  }
  const double mass_error = std::abs(mass - 1.0);
  assert(mass_error < 1e-12);
  if (mass_error > stats_.max_mass_error) stats_.max_mass_error = mass_error;
  tt_.store(afterstate, depth, sum, cutoffs_ == cutoffs_before);
  return sum;
}

std::optional<MoveChoice> Searcher::search_root(Board state, int depth) {
  std::optional<MoveChoice> best;
  for (Move m : kMoves) {
    const auto out = slide(state, m);
    if (!out.legal) continue;
    const double v = out.reward + value_at(out.afterstate, depth - 1);
    if (!best || v > best->value) best = MoveChoice{m, v, depth};
  }
  return best;
}

MoveChoice Searcher::choose_move(Board state, const SearchLimit& limit) {
  if (is_terminal(state)) throw std::logic_error("choose_move: terminal state");
  timed_ = false;
  if (limit.mode == SearchLimit::Mode::Depth) {
    cutoffs_ = 0;
    auto choice = *search_root(state, limit.depth);
    stats_.completed_depth = limit.depth;
    return choice;
  }

  const auto start = std::chrono::steady_clock::now();
  deadline_ = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double, std::milli>(limit.time_ms));
  // Depth 1 always completes so there is a move to return.
  cutoffs_ = 0;
  MoveChoice best = *search_root(state, 1);
  stats_.completed_depth = 1;
  for (int depth = 2; depth <= kMaxDepth; ++depth) {
    if (cutoffs_ == 0) break;  // previous iteration reached every terminal: deeper is identical
    if (std::chrono::steady_clock::now() >= deadline_) break;
    timed_ = true;
    until_clock_check_ = kNodesPerClockCheck;
    cutoffs_ = 0;
    try {
      best = *search_root(state, depth);
      stats_.completed_depth = depth;
    } catch (const Aborted&) {
      break;
    }
  }
  timed_ = false;
  return best;
}

GameRecord play_game(const NTupleNetwork& network, const SearchLimit& limit, std::uint64_t seed,
                     std::size_t tt_capacity) {
  Rng rng(seed);
  Searcher searcher(network, tt_capacity);
  GameRecord rec;
  rec.seed = seed;
  Board state = initial_state(rng);
  const auto t0 = std::chrono::steady_clock::now();
  while (!is_terminal(state)) {
    const auto choice = searcher.choose_move(state, limit);
    const auto out = slide(state, choice.move);
    rec.score += out.reward;
    ++rec.moves;
    state = spawn_random_tile(out.afterstate, rng);
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  rec.ms_per_move = rec.moves ? ms / static_cast<double>(rec.moves) : 0.0;
  const int e = state.max_exponent();
  rec.max_tile = e == 0 ? 0U : 1U << e;
  return rec;
}

std::string csv_header() { return "seed,score,max_tile,moves"; }

std::string to_csv(const GameRecord& r) {
  std::ostringstream os;
  os << r.seed << ',' << r.score << ',' << r.max_tile << ',' << r.moves;
  return os.str();
}

}  // namespace n2048
