#include "n2048/trainer.hpp"

#include <omp.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>

#include "n2048/errors.hpp"
#include "n2048/network_io.hpp"

namespace n2048 {

namespace {

// Keeps evaluation seeds disjoint from training seeds.
constexpr std::uint64_t kEvalSalt1 = 0x1B1E5EEDULL;
constexpr std::uint64_t kEvalSalt3 = 0x3B1E5EEDULL;
constexpr std::uint64_t kWorkerSalt = 0x7A1E5EEDULL;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string curve_header() {
  return "actions,episodes,score1,ci1,score3,ci3,max_tile_32768_pct,max_tile_16384_pct,wall_s";
}

std::string to_csv(const CheckpointRecord& r) {
  std::ostringstream os;
  os << r.actions << ',' << r.episodes << ',' << r.score1.mean << ',' << r.score1.ci95 << ',' << r.score3.mean << ','
     << r.score3.ci95 << ',' << r.pct_32768 << ',' << r.pct_16384 << ',' << r.wall_s;
  return os.str();
}

CheckpointRecord evaluate_checkpoint(const NTupleNetwork& network, int n1, int n3, std::uint64_t seed, int threads) {
  CheckpointRecord rec;
  if (n1 > 0) {
    const auto r1 = evaluate_games(network, SearchLimit::plies(1), n1, seed ^ kEvalSalt1, threads);
    rec.score1 = r1.score;
    rec.pct_32768 = r1.pct_32768;
    rec.pct_16384 = r1.pct_16384;
    for (const auto& g : r1.games) {
      int e = 0;
      while ((1U << (e + 1)) <= g.max_tile && e < 15) ++e;
      ++rec.max_tile_histogram[static_cast<std::size_t>(g.max_tile ? e : 0)];
    }
  }
  if (n3 > 0) {
    const auto r3 = evaluate_games(network, SearchLimit::plies(3), n3, seed ^ kEvalSalt3, threads);
    rec.score3 = r3.score;
  }
  return rec;
}

Trainer::Trainer(RunConfig config)
    : Trainer(config, [&] {
        config.validate();
        return std::make_unique<ValueLearner>(NTupleNetwork(architecture(config.arch), config.learning.stage_bits),
                                              config.learning);
      }()) {}

Trainer::Trainer(RunConfig config, std::unique_ptr<ValueLearner> learner)
    : config_(std::move(config)), learner_(std::move(learner)), carousel_(config_.learning.stage_bits) {
  const int workers = config_.budget.workers;
  for (int w = 0; w < workers; ++w) rngs_.emplace_back(game_seed(config_.seed ^ kWorkerSalt, static_cast<std::uint64_t>(w)));
  cursors_.assign(static_cast<std::size_t>(workers), CarouselCursor{});
  next_tick_ = config_.budget.eval_every;
}

void Trainer::train_until(std::uint64_t target) {
  if (actions_ >= target) return;
  const bool use_carousel = config_.learning.carousel && config_.learning.stage_bits > 0;
  std::atomic<std::uint64_t> actions{actions_};
  std::atomic<std::uint64_t> episodes{episodes_};

  auto worker = [&](int w) {
    EpisodeLearner learner(*learner_);
    Rng& rng = rngs_[static_cast<std::size_t>(w)];
    CarouselCursor& cursor = cursors_[static_cast<std::size_t>(w)];
    // The counter is bumped once per finished episode, so a segment can
    // overshoot its target by at most one episode per worker.
    while (actions.load(std::memory_order_relaxed) < target) {
      const Board start = use_carousel ? cursor.next_start(carousel_, rng) : initial_state(rng);
      const auto stats = learner.learn_from_episode(start, rng, use_carousel ? &carousel_ : nullptr);
      actions.fetch_add(stats.moves, std::memory_order_relaxed);
      episodes.fetch_add(1, std::memory_order_relaxed);
      if (use_carousel) cursor.advance(carousel_);
    }
  };

  const auto t0 = std::chrono::steady_clock::now();
  const int workers = static_cast<int>(rngs_.size());
  if (workers == 1) {
    worker(0);
  } else {
#pragma omp parallel num_threads(workers)
    worker(omp_get_thread_num());
  }
  train_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  actions_ = actions.load();
  episodes_ = episodes.load();
}

void Trainer::tick() {
  auto rec = evaluate_checkpoint(network(), config_.budget.eval_games_1ply, config_.budget.eval_games_3ply,
                                 game_seed(config_.seed, ticks_), eval_threads_);
  rec.actions = actions_;
  rec.episodes = episodes_;
  rec.wall_s = train_seconds_;
  curve_.push_back(rec);
  ++ticks_;
  if (log_) {
    *log_ << "[train] actions=" << rec.actions << " episodes=" << rec.episodes << " score1=" << rec.score1.mean
          << " +- " << rec.score1.ci95 << " score3=" << rec.score3.mean << " +- " << rec.score3.ci95
          << " train_s=" << rec.wall_s << '\n'
          << std::flush;
  }
}

void Trainer::write_outputs(bool final_write) const {
  if (config_.out.empty()) return;
  const std::filesystem::path dir(config_.out);
  std::string curve = curve_header() + "\n";
  for (const auto& r : curve_) curve += to_csv(r) + "\n";
  write_text(dir / kCurveFile, curve);
  save_checkpoint(dir / kCheckpointFile);
  if (final_write) save_network(network(), dir / kNetworkFile);
}

void Trainer::run() {
  if (!config_.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config_.out, ec);
    if (ec) throw IoError("cannot create output directory " + config_.out + ": " + ec.message());
    write_text(std::filesystem::path(config_.out) / kRunConfigFile, to_kv(config_));
  }
  const std::uint64_t total = config_.budget.total_actions;
  const std::uint64_t every = config_.budget.eval_every;
  while (actions_ < total) {
    const bool ticking = every > 0 && next_tick_ <= total;
    train_until(ticking ? next_tick_ : total);
    if (ticking) {
      tick();
      while (next_tick_ <= actions_) next_tick_ += every;
      write_outputs(false);
    }
  }
  // A budget that is not a multiple of the interval still ends on a row.
  if (every > 0 && actions_ > 0 && (curve_.empty() || curve_.back().actions != actions_)) tick();
  write_outputs(true);
}

}  // namespace n2048
