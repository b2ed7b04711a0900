#include "n2048/learning.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "n2048/carousel.hpp"
#include "n2048/errors.hpp"

namespace n2048 {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::TD: return "td";
    case Rule::TC: return "tc";
    case Rule::Autostep: return "autostep";
  }
  return "?";
}

Rule parse_rule(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "td") return Rule::TD;
  if (lower == "tc") return Rule::TC;
  if (lower == "autostep") return Rule::Autostep;
  throw ConfigError("unknown rule: " + std::string(text));
}

int horizon(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must be in [0, 1)");
  if (lambda == 0.0) return 0;
  const double exact = std::log(0.1) / std::log(lambda);
  return std::max(0, static_cast<int>(std::ceil(exact)) - 1);
}

void LearningConfig::validate() const {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ConfigError("lambda must be in [0, 1)");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must be in [0, 1]");
  if (stage_bits < 0 || stage_bits > kMaxStageBits) throw ConfigError("stages must be in [0, 5]");
  if (rule == Rule::Autostep) {
    if (lambda != 0.0) throw ConfigError("autostep requires lambda = 0");
    if (!(autostep.mu >= 0.0)) throw ConfigError("mu must be non-negative");
    if (!(autostep.tau > 0.0 && autostep.tau <= 1.0)) throw ConfigError("tau must be in (0, 1]");
    if (!(autostep.alpha_init > 0.0)) throw ConfigError("alpha_init must be positive");
  }
}

ActionValue evaluate_action(Board board, Move move, const NTupleNetwork& network) {
  const auto out = slide(board, move);
  if (!out.legal) throw std::logic_error("evaluate_action: illegal move");
  return {move, out.reward + network.evaluate(out.afterstate), out.afterstate, out.reward};
}

std::optional<ActionValue> greedy_action(Board board, const NTupleNetwork& network) {
  std::optional<ActionValue> best;
  for (Move m : kMoves) {
    const auto out = slide(board, m);
    if (!out.legal) continue;
    const double v = out.reward + network.evaluate(out.afterstate);
    if (!best || v > best->value) best = ActionValue{m, v, out.afterstate, out.reward};
  }
  return best;
}

UpdateSchedule::UpdateSchedule(double lambda, int horizon, bool delayed)
    : ring_(static_cast<std::size_t>(horizon) + 1), pow_(static_cast<std::size_t>(horizon) + 1), delayed_(delayed) {
  double p = 1.0;
  for (auto& x : pow_) {
    x = p;
    p *= lambda;
  }
}

ValueLearner::ValueLearner(NTupleNetwork network, LearningConfig config)
    : network_(std::move(network)), config_(config) {
  config_.validate();
  if (config_.stage_bits != network_.stage_bits()) throw ConfigError("network stage count does not match config");
  if (config_.rule == Rule::TC) {
    for (std::size_t i = 0; i < network_.tuple_count(); ++i) tc_.emplace_back(network_.table(i).size());
  } else if (config_.rule == Rule::Autostep) {
    const AutostepCell<float> init{static_cast<float>(config_.autostep.alpha_init), 0.0f, 0.0f};
    for (std::size_t i = 0; i < network_.tuple_count(); ++i) autostep_.emplace_back(network_.table(i).size(), init);
  }
}

bool ValueLearner::promote_weight(std::size_t tuple, int stage, std::uint64_t index) {
  if (stage <= 0) return false;
  auto t = network_.table(tuple);
  const std::uint64_t size = network_.stage_table_size(tuple);
  const std::uint64_t off = static_cast<std::uint64_t>(stage) * size + index;
  if (relaxed_load(t[off]) != 0.0f) return false;
  relaxed_store(t[off], relaxed_load(t[off - size]));
  return true;
}

double ValueLearner::value(Board afterstate) {
  const int stage = stage_of(afterstate, network_.stage_bits());
  const bool promote = config_.weight_promotion && stage > 0;
  double total = 0;
  network_.for_each_tuple(afterstate, stage, [&](std::size_t i, const ViewOffsets& off) {
    float* t = network_.table(i).data();
    const std::uint64_t size = network_.stage_table_size(i);
    std::array<float, 8> vals;
    for (int v = 0; v < 8; ++v) {
      float w = relaxed_load(t[off[v]]);
      if (promote && w == 0.0f) {
        w = relaxed_load(t[off[v] - size]);
        relaxed_store(t[off[v]], w);
      }
      vals[v] = w;
    }
    total += order_free_sum(vals);
  });
  return total;
}

void ValueLearner::apply(Board afterstate, double signal) {
  switch (config_.rule) {
    case Rule::TD: apply_td(afterstate, signal); break;
    case Rule::TC: apply_tc(afterstate, signal); break;
    case Rule::Autostep: apply_autostep(afterstate, signal); break;
  }
}

void ValueLearner::apply_td(Board afterstate, double signal) {
  const double step = config_.alpha / network_.view_count();
  network_.for_each_tuple(afterstate, [&](std::size_t i, const ViewOffsets& off) {
    float* t = network_.table(i).data();
    for (int v = 0; v < 8; ++v) {
      float& w = t[off[v]];
      relaxed_store(w, static_cast<float>(td_step<double>(relaxed_load(w), signal, step)));
    }
  });
}

void ValueLearner::apply_tc(Board afterstate, double signal) {
  const double step = config_.beta / network_.view_count();
  network_.for_each_tuple(afterstate, [&](std::size_t i, const ViewOffsets& off) {
    float* t = network_.table(i).data();
    TcAccumulator* acc = tc_[i].data();
    for (int v = 0; v < 8; ++v) {
      float& w = t[off[v]];
      TcAccumulator& ea = acc[off[v]];
      const TcCell<double> before{relaxed_load(w), relaxed_load(ea.e), relaxed_load(ea.a)};
      const auto after = tc_step(before, signal, step);
      relaxed_store(w, static_cast<float>(after.value));
      relaxed_store(ea.e, static_cast<float>(after.e));
      relaxed_store(ea.a, static_cast<float>(after.a));
    }
  });
}

void ValueLearner::apply_autostep(Board afterstate, double signal) {
  struct Active {
    std::size_t tuple;
    std::uint64_t offset;
  };
  thread_local std::vector<Active> active;
  thread_local std::vector<AutostepCell<double>> cells;
  thread_local std::vector<double> weights;
  thread_local std::vector<double> x;
  active.clear();
  cells.clear();
  weights.clear();
  x.clear();
  network_.for_each_tuple(afterstate, [&](std::size_t i, const ViewOffsets& off) {
    // A slot hit by k views is one feature with value k.
    for (int v = 0; v < 8; ++v) {
      bool seen = false;
      for (int u = 0; u < v; ++u) seen = seen || off[u] == off[v];
      if (seen) continue;
      int count = 0;
      for (int u = v; u < 8; ++u) count += off[u] == off[v] ? 1 : 0;
      const float* t = network_.table(i).data();
      const auto& c = autostep_[i][off[v]];
      active.push_back({i, off[v]});
      cells.push_back({relaxed_load(c.alpha), relaxed_load(c.h), relaxed_load(c.v)});
      weights.push_back(relaxed_load(t[off[v]]));
      x.push_back(count);
    }
  });
  autostep_step<double>(cells, weights, x, signal, config_.autostep);
  for (std::size_t k = 0; k < active.size(); ++k) {
    auto& c = autostep_[active[k].tuple][active[k].offset];
    relaxed_store(c.alpha, static_cast<float>(cells[k].alpha));
    relaxed_store(c.h, static_cast<float>(cells[k].h));
    relaxed_store(c.v, static_cast<float>(cells[k].v));
    relaxed_store(network_.table(active[k].tuple)[active[k].offset], static_cast<float>(weights[k]));
  }
}

EpisodeLearner::EpisodeLearner(ValueLearner& model)
    : model_(model), schedule_(model.config().lambda, model.config().horizon(), model.config().delayed) {}

EpisodeStats EpisodeLearner::learn_from_episode(Board start, Rng& rng, CarouselState* carousel) {
  EpisodeStats stats;
  stats.max_exponent = start.max_exponent();
  const int g = model_.network().stage_bits();
  const bool record = carousel != nullptr && model_.config().carousel && g > 0;
  auto emit = [this](Board s, double signal) { model_.apply(s, signal); };

  Board state = start;
  Board prev_after;
  int prev_stage = stage_of(start, g);
  bool have_prev = false;
  while (true) {
    std::optional<ActionValue> best;
    for (Move m : kMoves) {
      const auto out = slide(state, m);
      if (!out.legal) continue;
      const double v = out.reward + model_.value(out.afterstate);
      if (!best || v > best->value) best = ActionValue{m, v, out.afterstate, out.reward};
    }
    if (!best) break;

    const double next_value = best->value - best->reward;
    if (have_prev) {
      const double delta = best->reward + next_value - model_.value(prev_after);
      schedule_.push(prev_after, delta, emit);
    }
    const int stage = stage_of(best->afterstate, g);
    if (stage == prev_stage + 1) {
      ++stats.stage_transitions;
      if (record) carousel->record(stage, best->afterstate);
    }
    prev_after = best->afterstate;
    prev_stage = stage;
    have_prev = true;

    stats.score += best->reward;
    ++stats.moves;
    stats.max_exponent = std::max(stats.max_exponent, prev_after.max_exponent());
    state = spawn_random_tile(prev_after, rng);
  }
  if (have_prev) schedule_.push(prev_after, -model_.value(prev_after), emit);
  schedule_.finish(emit);
  return stats;
}

}  // namespace n2048
