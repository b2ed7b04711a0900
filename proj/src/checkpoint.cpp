// Checkpoint file:
//
//   "NTCK" | version u32 | run config (key=value text)
//   actions u64 | episodes u64 | next tick u64 | ticks u64 | train seconds f64
//   worker count u32, per worker: RNG state (text) | carousel pointer i32
//   carousel stage bits u8, per stage: count u32 | count boards u64
//   curve row count u32, per row: the CheckpointRecord fields
//   network body (as in the network file, without its CRC)
//   aux flags u8 (bit 0: TC accumulators, bit 1: Autostep state), aux tables
//   CRC32 u32

#include <sstream>

#include "n2048/errors.hpp"
#include "n2048/network_io.hpp"
#include "n2048/trainer.hpp"

namespace n2048 {

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;
constexpr char kMagic[4] = {'N', 'T', 'C', 'K'};

void put_summary(BinaryWriter& w, const Summary& s) {
  w.put<std::uint64_t>(s.n);
  w.put(s.mean);
  w.put(s.sd);
  w.put(s.ci95);
}

Summary get_summary(BinaryReader& r) {
  Summary s;
  s.n = r.get<std::uint64_t>();
  s.mean = r.get<double>();
  s.sd = r.get<double>();
  s.ci95 = r.get<double>();
  return s;
}

}  // namespace

void Trainer::save_checkpoint(const std::filesystem::path& path) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    BinaryWriter w(tmp);
    w.bytes(kMagic, 4);
    w.put(kCheckpointVersion);
    w.string(to_kv(config_));
    w.put(actions_);
    w.put(episodes_);
    w.put(next_tick_);
    w.put(ticks_);
    w.put(train_seconds_);

    w.put(static_cast<std::uint32_t>(rngs_.size()));
    for (std::size_t i = 0; i < rngs_.size(); ++i) {
      std::ostringstream os;
      os << rngs_[i];
      w.string(os.str());
      w.put(static_cast<std::int32_t>(cursors_[i].pointer()));
    }

    const int g = carousel_.stage_bits();
    w.put(static_cast<std::uint8_t>(g));
    for (int s = 0; s < (1 << g); ++s) {
      const auto members = carousel_.members(s);
      w.put(static_cast<std::uint32_t>(members.size()));
      for (Board b : members) w.put(b.bits());
    }

    w.put(static_cast<std::uint32_t>(curve_.size()));
    for (const auto& rec : curve_) {
      w.put(rec.actions);
      w.put(rec.episodes);
      put_summary(w, rec.score1);
      put_summary(w, rec.score3);
      w.put(rec.pct_32768);
      w.put(rec.pct_16384);
      w.put(rec.wall_s);
      w.bytes(rec.max_tile_histogram.data(), sizeof(rec.max_tile_histogram));
    }

    write_network_body(w, learner_->network());

    const std::uint8_t flags = (learner_->has_tc() ? 1 : 0) | (learner_->has_autostep() ? 2 : 0);
    w.put(flags);
    for (const auto& t : learner_->tc_tables()) w.bytes(t.data(), t.size() * sizeof(TcAccumulator));
    for (const auto& t : learner_->autostep_tables()) w.bytes(t.data(), t.size() * sizeof(AutostepCell<float>));
    w.finish();
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

Trainer Trainer::resume(const std::filesystem::path& path, const std::optional<std::string>& expected_arch) {
  BinaryReader r(path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::string_view(magic, 4) != std::string_view(kMagic, 4)) throw FormatError("not a checkpoint file");
  if (r.get<std::uint32_t>() != kCheckpointVersion) throw FormatError("unsupported checkpoint version");

  RunConfig config;
  try {
    config = parse_kv(r.string());
    config.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config: ") + e.what());
  }
  if (expected_arch && *expected_arch != config.arch) {
    throw ConfigError("checkpoint architecture is " + config.arch + ", not " + *expected_arch);
  }

  const auto actions = r.get<std::uint64_t>();
  const auto episodes = r.get<std::uint64_t>();
  const auto next_tick = r.get<std::uint64_t>();
  const auto ticks = r.get<std::uint64_t>();
  const auto train_seconds = r.get<double>();

  const auto workers = r.get<std::uint32_t>();
  if (workers != static_cast<std::uint32_t>(config.budget.workers)) throw FormatError("worker count mismatch");
  std::vector<Rng> rngs(workers);
  std::vector<CarouselCursor> cursors;
  for (auto& rng : rngs) {
    std::istringstream is(r.string());
    is >> rng;
    if (!is) throw FormatError("bad RNG state");
    const auto pointer = r.get<std::int32_t>();
    if (pointer < 1 || pointer > (1 << config.learning.stage_bits)) throw FormatError("bad carousel pointer");
    cursors.emplace_back(pointer);
  }

  const int g = r.get<std::uint8_t>();
  if (g != config.learning.stage_bits) throw FormatError("carousel stage count mismatch");
  CarouselState carousel(g);
  for (int s = 0; s < (1 << g); ++s) {
    const auto n = r.get<std::uint32_t>();
    if (n > carousel.capacity()) throw FormatError("carousel set too large");
    std::vector<Board> members;
    for (std::uint32_t k = 0; k < n; ++k) members.emplace_back(r.get<std::uint64_t>());
    carousel.restore(s, members);
  }

  const auto rows = r.get<std::uint32_t>();
  if (rows > (1U << 24)) throw FormatError("curve too long");
  std::vector<CheckpointRecord> curve(rows);
  for (auto& rec : curve) {
    rec.actions = r.get<std::uint64_t>();
    rec.episodes = r.get<std::uint64_t>();
    rec.score1 = get_summary(r);
    rec.score3 = get_summary(r);
    rec.pct_32768 = r.get<double>();
    rec.pct_16384 = r.get<double>();
    rec.wall_s = r.get<double>();
    r.bytes(rec.max_tile_histogram.data(), sizeof(rec.max_tile_histogram));
  }

  NTupleNetwork network = read_network_body(r);
  if (network.stage_bits() != g || !network.architecture().same_geometry(architecture(config.arch))) {
    throw FormatError("checkpoint network does not match its config");
  }
  auto learner = std::make_unique<ValueLearner>(std::move(network), config.learning);

  const auto flags = r.get<std::uint8_t>();
  const std::uint8_t expected = (learner->has_tc() ? 1 : 0) | (learner->has_autostep() ? 2 : 0);
  if (flags != expected) throw FormatError("checkpoint learning state does not match its rule");
  for (auto& t : learner->tc_tables()) r.bytes(t.data(), t.size() * sizeof(TcAccumulator));
  for (auto& t : learner->autostep_tables()) r.bytes(t.data(), t.size() * sizeof(AutostepCell<float>));
  r.finish();

  Trainer trainer(config, std::move(learner));
  trainer.carousel_ = carousel;
  trainer.rngs_ = std::move(rngs);
  trainer.cursors_ = std::move(cursors);
  trainer.actions_ = actions;
  trainer.episodes_ = episodes;
  trainer.next_tick_ = next_tick;
  trainer.ticks_ = ticks;
  trainer.train_seconds_ = train_seconds;
  trainer.curve_ = std::move(curve);
  return trainer;
}

}  // namespace n2048
