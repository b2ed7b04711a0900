#pragma once

// Budget-driven training with lock-free worker parallelism, periodic
// evaluation ticks and resumable checkpoints.
//
// Workers are OpenMP threads that share the value tables without locks.
// At every evaluation tick the parallel region ends (workers finish their
// current episode), the snapshot is evaluated, a curve row is appended and
// a checkpoint is written. workers = 1 is bit-reproducible for a seed.

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "n2048/carousel.hpp"
#include "n2048/learning.hpp"
#include "n2048/run_config.hpp"
#include "n2048/stats.hpp"

namespace n2048 {

struct CheckpointRecord {
  std::uint64_t actions = 0;
  std::uint64_t episodes = 0;
  Summary score1;
  Summary score3;
  double pct_32768 = 0;  // of the 1-ply games
  double pct_16384 = 0;
  double wall_s = 0;     // training wall-clock so far, evaluation excluded
  std::array<std::uint32_t, 16> max_tile_histogram{};  // 1-ply games by max exponent
};

std::string curve_header();
std::string to_csv(const CheckpointRecord& r);

// n1 games at 1-ply and n3 at 3-ply, never touching the weights.
CheckpointRecord evaluate_checkpoint(const NTupleNetwork& network, int n1, int n3, std::uint64_t seed,
                                     int threads = 0);

inline constexpr const char* kCurveFile = "curve.csv";
inline constexpr const char* kCheckpointFile = "checkpoint.ntck";
inline constexpr const char* kNetworkFile = "network.ntnw";
inline constexpr const char* kRunConfigFile = "run.cfg";

class Trainer {
 public:
  // Fresh run with a zero network. Throws ConfigError.
  explicit Trainer(RunConfig config);

  // Restores everything needed to continue bit-exactly. Throws FormatError
  // on a corrupt checkpoint and ConfigError if `expected_arch` differs from
  // the checkpoint's architecture.
  static Trainer resume(const std::filesystem::path& checkpoint,
                        const std::optional<std::string>& expected_arch = std::nullopt);

  // Trains until the action budget is consumed. With a non-empty
  // config().out, writes run.cfg, appends curve.csv rows, rewrites
  // checkpoint.ntck at every tick and at the end, and saves network.ntnw.
  void run();

  void set_total_actions(std::uint64_t total) { config_.budget.total_actions = total; }
  void set_out_dir(std::string out) { config_.out = std::move(out); }
  void set_eval_threads(int threads) { eval_threads_ = threads; }
  // Progress lines (one per tick); nullptr silences.
  void set_log(std::ostream* log) { log_ = log; }

  void save_checkpoint(const std::filesystem::path& path) const;

  const RunConfig& config() const { return config_; }
  const NTupleNetwork& network() const { return learner_->network(); }
  ValueLearner& learner() { return *learner_; }
  const CarouselState& carousel() const { return carousel_; }
  std::uint64_t actions() const { return actions_; }
  std::uint64_t episodes() const { return episodes_; }
  const std::vector<CheckpointRecord>& curve() const { return curve_; }
  // Wall-clock seconds spent in training segments.
  double train_seconds() const { return train_seconds_; }

 private:
  Trainer(RunConfig config, std::unique_ptr<ValueLearner> learner);

  void train_until(std::uint64_t target);
  void tick();
  void write_outputs(bool final_write) const;

  RunConfig config_;
  std::unique_ptr<ValueLearner> learner_;
  CarouselState carousel_;
  std::vector<Rng> rngs_;
  std::vector<CarouselCursor> cursors_;
  std::uint64_t actions_ = 0;
  std::uint64_t episodes_ = 0;
  std::uint64_t next_tick_ = 0;
  std::uint64_t ticks_ = 0;
  double train_seconds_ = 0;
  std::vector<CheckpointRecord> curve_;
  int eval_threads_ = 0;
  std::ostream* log_ = nullptr;
};

}  // namespace n2048
