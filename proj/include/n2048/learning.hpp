#pragma once

// Afterstate value learning: TD(lambda), TC(lambda) and Autostep, each in
// standard or delayed form, with multi-stage weight promotion.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "n2048/board.hpp"
#include "n2048/network.hpp"
#include "n2048/update_rules.hpp"

namespace n2048 {

class CarouselState;

enum class Rule { TD, TC, Autostep };

std::string_view to_string(Rule rule);
// Accepts "td", "tc", "autostep" (case-insensitive). Throws ConfigError.
Rule parse_rule(std::string_view text);

// h = ceil(log_lambda 0.1) - 1, and 0 for lambda = 0. Throws
// std::invalid_argument for lambda outside [0, 1).
int horizon(double lambda);

struct LearningConfig {
  Rule rule = Rule::TC;
  bool delayed = true;
  double lambda = 0.5;
  double alpha = 1.0;  // TD
  double beta = 1.0;   // TC
  AutostepParams autostep{};
  int stage_bits = 0;
  bool weight_promotion = false;
  bool carousel = false;

  int horizon() const { return n2048::horizon(lambda); }
  // Throws ConfigError for inconsistent settings.
  void validate() const;
};

struct ActionValue {
  Move move = Move::Up;
  double value = 0;  // reward + V(afterstate)
  Board afterstate;
  std::uint32_t reward = 0;
};

// Throws std::logic_error if the move is illegal.
ActionValue evaluate_action(Board board, Move move, const NTupleNetwork& network);
// Greedy argmax with ties going to the earlier direction in kMoves;
// nullopt for a terminal board.
std::optional<ActionValue> greedy_action(Board board, const NTupleNetwork& network);

// Ring of the last h+1 (afterstate, delta) pairs. Standard mode emits
// delta * lambda^(t-k) for every buffered state on each push; delayed mode
// emits the accumulated Delta once per state, h steps late, and flushes the
// tail in finish().
class UpdateSchedule {
 public:
  UpdateSchedule(double lambda, int horizon, bool delayed);

  template <class Emit>
  void push(Board afterstate, double delta, Emit&& emit) {
    const std::size_t cap = ring_.size();
    if (count_ == cap) {
      head_ = (head_ + 1) % cap;
      --count_;
    }
    ring_[(head_ + count_) % cap] = {afterstate, delta};
    ++count_;
    if (!delayed_) {
      for (std::size_t back = 0; back < count_; ++back) {
        const auto& e = ring_[(head_ + count_ - 1 - back) % cap];
        emit(e.afterstate, delta * pow_[back]);
      }
    } else if (count_ == cap) {
      emit_oldest(emit);
    }
  }

  template <class Emit>
  void finish(Emit&& emit) {
    if (delayed_) {
      while (count_ > 0) emit_oldest(emit);
    }
    head_ = 0;
    count_ = 0;
  }

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return ring_.size(); }
  bool delayed() const { return delayed_; }

 private:
  struct Entry {
    Board afterstate;
    double delta = 0;
  };

  template <class Emit>
  void emit_oldest(Emit& emit) {
    const std::size_t cap = ring_.size();
    double acc = 0;
    for (std::size_t k = 0; k < count_; ++k) acc += ring_[(head_ + k) % cap].delta * pow_[k];
    const Board s = ring_[head_].afterstate;
    head_ = (head_ + 1) % cap;
    --count_;
    emit(s, acc);
  }

  std::vector<Entry> ring_;
  std::vector<double> pow_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  bool delayed_;
};

struct TcAccumulator {
  float e = 0;
  float a = 0;
};

// Value tables plus whatever per-weight state the configured rule needs,
// shared by all workers without locks.
class ValueLearner {
 public:
  ValueLearner(NTupleNetwork network, LearningConfig config);

  NTupleNetwork& network() { return network_; }
  const NTupleNetwork& network() const { return network_; }
  const LearningConfig& config() const { return config_; }

  bool has_tc() const { return !tc_.empty(); }
  bool has_autostep() const { return !autostep_.empty(); }
  std::vector<std::vector<TcAccumulator>>& tc_tables() { return tc_; }
  const std::vector<std::vector<TcAccumulator>>& tc_tables() const { return tc_; }
  std::vector<std::vector<AutostepCell<float>>>& autostep_tables() { return autostep_; }
  const std::vector<std::vector<AutostepCell<float>>>& autostep_tables() const { return autostep_; }

  // V(afterstate) as used during learning: with weight promotion enabled,
  // zero slots in stage s > 0 are first copied from stage s - 1.
  double value(Board afterstate);

  // Copies the stage-(s-1) weight into an untouched (exactly 0.0) slot of
  // stage s > 0. Returns true if it promoted.
  bool promote_weight(std::size_t tuple, int stage, std::uint64_t index);

  // One actual update of every active weight of `afterstate` by `signal`.
  void apply(Board afterstate, double signal);

 private:
  void apply_td(Board afterstate, double signal);
  void apply_tc(Board afterstate, double signal);
  void apply_autostep(Board afterstate, double signal);

  NTupleNetwork network_;
  LearningConfig config_;
  std::vector<std::vector<TcAccumulator>> tc_;
  std::vector<std::vector<AutostepCell<float>>> autostep_;
};

struct EpisodeStats {
  std::uint64_t score = 0;
  std::uint64_t moves = 0;
  int max_exponent = 0;
  int stage_transitions = 0;
};

// Per-worker episode driver (owns the update ring).
class EpisodeLearner {
 public:
  explicit EpisodeLearner(ValueLearner& model);

  // Greedy self-play from `start` (a state, not an afterstate) to the end
  // of the game, dispatching every prediction error to the model. Stage
  // transitions are recorded into `carousel` when given.
  EpisodeStats learn_from_episode(Board start, Rng& rng, CarouselState* carousel = nullptr);

 private:
  ValueLearner& model_;
  UpdateSchedule schedule_;
};

}  // namespace n2048
