// Acceptance checks, one per criterion. Each prints a single line
//   criterion N: PASS|FAIL|SKIP  <measurements>
// and exits 0 (pass), 1 (fail) or 77 (skip).
//
// usage: n2048_acceptance <1..12 | train> [--work DIR]
// Criteria 9 and 10 read the networks and curves produced by `train`.

#include <CLI11.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>

#include "n2048/architecture.hpp"
#include "n2048/errors.hpp"
#include "n2048/learning.hpp"
#include "n2048/network_io.hpp"
#include "n2048/search.hpp"
#include "n2048/stats.hpp"
#include "n2048/trainer.hpp"
#include "oracle.hpp"

using namespace n2048;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kSkip = 77;

std::filesystem::path g_work;

int report(int n, int status, const std::string& details) {
  const char* word = status == kPass ? "PASS" : status == kSkip ? "SKIP" : "FAIL";
  std::printf("criterion %d: %s  %s\n", n, word, details.c_str());
  std::fflush(stdout);
  return status;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void fill_uniform(NTupleNetwork& net, std::uint64_t seed, float lo, float hi) {
  Rng rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  for (std::size_t i = 0; i < net.tuple_count(); ++i)
    for (float& w : net.table(i)) w = u(rng);
}

// States met in random play.
std::vector<Board> play_positions(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Board> out;
  Board s = initial_state(rng);
  while (static_cast<int>(out.size()) < n) {
    if (is_terminal(s)) {
      s = initial_state(rng);
      continue;
    }
    out.push_back(s);
    const auto legal = legal_moves(s);
    Move m;
    do {
      m = kMoves[rng() % 4];
    } while (!legal.contains(m));
    s = spawn_random_tile(slide(s, m).afterstate, rng);
  }
  return out;
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

// ---------------------------------------------------------------------------

int criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t mismatches = 0;
  for (std::uint32_t row = 0; row < 65536; ++row) {
    for (Move m : {Move::Left, Move::Right}) {
      std::array<int, 4> line{};
      for (int c = 0; c < 4; ++c) line[c] = static_cast<int>((row >> (4 * (m == Move::Left ? c : 3 - c))) & 0xF);
      const std::uint32_t reward = oracle::slide_line(line);
      std::uint32_t expected = 0;
      for (int c = 0; c < 4; ++c)
        expected |= static_cast<std::uint32_t>(line[c]) << (4 * (m == Move::Left ? c : 3 - c));
      const auto out = slide(Board(row), m);
      if (out.afterstate.bits() != expected || out.reward != reward) ++mismatches;
    }
  }
  const double s = seconds_since(t0);
  return report(1, mismatches == 0 && s < 1.0 ? kPass : kFail,
                fmt("131072 row slides, %llu mismatches, %.3f s (limit 1 s)", (unsigned long long)mismatches, s));
}

int criterion2() {
  constexpr int kSpawns = 1'000'000;
  Rng rng(2024);
  std::array<double, 16> cell{};
  int fours = 0;
  for (int k = 0; k < kSpawns; ++k) {
    const Board b = spawn_random_tile(Board(), rng);
    for (int c = 0; c < 16; ++c) {
      if (b.cell(c) != 0) {
        cell[static_cast<std::size_t>(c)] += 1;
        fours += b.cell(c) == 2 ? 1 : 0;
      }
    }
  }
  const double frac = static_cast<double>(fours) / kSpawns;
  const double expected = kSpawns / 16.0;
  double chi2 = 0;
  for (double o : cell) chi2 += (o - expected) * (o - expected) / expected;
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(15), chi2));
  const bool ok = std::abs(frac - 0.1) <= 0.003 && p > 0.01;
  return report(2, ok ? kPass : kFail,
                fmt("4-tile fraction %.5f (0.100 +- 0.003), cell chi2 %.2f on 15 dof, p = %.4f (> 0.01)", frac, chi2, p));
}

int criterion3() {
  // Bijectivity, exhaustively, for every length-3 and length-4 shape in the
  // registry plus a scattered one.
  std::vector<TupleShape> shapes{{"3", {2, 9, 12}, false, {}}, {"4", {0, 5, 10, 15}, false, {}}};
  for (const auto& name : architecture_names())
    for (const auto& t : architecture(name).tuples)
      if (t.length() == 3 || t.length() == 4) shapes.push_back(t);
  std::size_t bad_shapes = 0;
  for (const auto& shape : shapes) {
    const std::uint64_t size = table_size_for(shape.length());
    std::vector<char> seen(size, 0);
    bool ok = true;
    for (std::uint64_t code = 0; code < size; ++code) {
      Board b;
      for (std::size_t j = 0; j < shape.length(); ++j) b = b.with_cell(shape.cells[j], static_cast<int>((code >> (4 * j)) & 0xF));
      const auto idx = tuple_index(b, shape);
      if (idx >= size || seen[idx]) ok = false;
      else seen[idx] = 1;
    }
    bad_shapes += ok ? 0 : 1;
  }

  NTupleNetwork net(architecture("42-33"), 2);
  fill_uniform(net, 3, -100.0f, 100.0f);
  Rng rng(4);
  int asymmetric = 0;
  for (int k = 0; k < 10000; ++k) {
    const Board b(rng());
    const double v = net.evaluate(b);
    for (Board s : symmetric_views(b)) asymmetric += net.evaluate(s) == v ? 0 : 1;
  }
  return report(3, bad_shapes == 0 && asymmetric == 0 ? kPass : kFail,
                fmt("%zu shapes bijective (%zu failed); 10000 boards x 8 views, %d inexact", shapes.size() - bad_shapes,
                    bad_shapes, asymmetric));
}

int criterion4() {
  const auto a = architecture("42-33").parameter_count(0);
  const auto b = architecture("421-43").parameter_count(0);
  const auto c = architecture("42-33").parameter_count(4);
  const bool ok = a == 67'108'864ULL && b == 1'342'177'280ULL && c == 1'073'741'824ULL;
  return report(4, ok ? kPass : kFail,
                fmt("42-33 g=0: %llu, 421-43 g=0: %llu, 42-33 g=4: %llu", (unsigned long long)a, (unsigned long long)b,
                    (unsigned long long)c));
}

// Replays one recorded (afterstate, delta) stream through the update
// schedule into double-precision per-weight state. The deltas are fixed
// inputs, so standard and delayed runs see identical sequences.
struct ReplayState {
  struct Cell {
    double w = 0, e = 0, a = 0;
  };
  std::unordered_map<std::uint64_t, Cell> cells;  // (tuple << 40) | offset
};

void replay(const NTupleNetwork& geometry, Rule rule, bool delayed, double lambda,
            const std::vector<std::pair<Board, double>>& stream, ReplayState& st) {
  const double step = 1.0 / geometry.view_count();
  UpdateSchedule sched(lambda, horizon(lambda), delayed);
  auto emit = [&](Board s, double signal) {
    geometry.for_each_tuple(s, [&](std::size_t i, const ViewOffsets& off) {
      for (int v = 0; v < 8; ++v) {
        auto& c = st.cells[(static_cast<std::uint64_t>(i) << 40) | off[v]];
        if (rule == Rule::TD) {
          c.w = td_step(c.w, signal, step);
        } else {
          const auto next = tc_step(TcCell<double>{c.w, c.e, c.a}, signal, step);
          c = {next.value, next.e, next.a};
        }
      }
    });
  };
  for (const auto& [s, d] : stream) sched.push(s, d, emit);
  sched.finish(emit);
}

int criterion5() {
  const NTupleNetwork geometry(architecture("4-22-3"), 0);
  Rng rng(55);
  std::uniform_int_distribution<int> length(1, 10000);
  std::normal_distribution<double> noise(0.0, 1.0);
  double td_max = 0, tc_w_max = 0, tc_a_max = 0, tc_e_max = 0;
  std::size_t weights = 0, tc_slots = 0, tc_agree = 0;
  for (int ep = 0; ep < 100; ++ep) {
    // Afterstates from a random game, replayed with recorded errors; the
    // game is restarted as needed to reach the drawn length.
    const int n = length(rng);
    const auto states = play_positions(n, rng());
    std::vector<std::pair<Board, double>> stream;
    for (Board s : states) stream.emplace_back(s, 100.0 * noise(rng));
    for (Rule rule : {Rule::TD, Rule::TC}) {
      ReplayState standard, late;
      replay(geometry, rule, false, 0.5, stream, standard);
      replay(geometry, rule, true, 0.5, stream, late);
      weights += standard.cells.size();
      for (const auto& [key, c] : standard.cells) {
        const auto& d = late.cells[key];
        if (rule == Rule::TD) {
          td_max = std::max(td_max, rel_err(c.w, d.w));
        } else {
          tc_w_max = std::max(tc_w_max, rel_err(c.w, d.w));
          ++tc_slots;
          tc_agree += rel_err(c.w, d.w) <= 1e-9 ? 1 : 0;
          tc_e_max = std::max(tc_e_max, rel_err(c.e, d.e));
          tc_a_max = std::max(tc_a_max, rel_err(c.a, d.a));
        }
      }
    }
  }
  const bool ok = td_max <= 1e-9 && tc_w_max <= 1e-9;
  return report(5, ok ? kPass : kFail,
                fmt("max relative difference delayed vs standard over %zu weight slots: TD %.2e, TC weight %.2e "
                    "(limit 1e-9, %.1f%% of TC slots within it); TC E %.2e, TC A %.2e",
                    weights, td_max, tc_w_max, 100.0 * static_cast<double>(tc_agree) / static_cast<double>(tc_slots),
                    tc_e_max, tc_a_max));
}

int criterion6() {
  // Kernel trace.
  TcCell<double> c{0, 0, 0};
  c = tc_step(c, 1.0, 1.0);
  c = tc_step(c, -1.0, 1.0);
  bool ok = c.e == 0.0 && c.a == 2.0 && tc_rate(c.e, c.a) == 0.0;

  // Same trace through the learner's float tables.
  LearningConfig cfg;
  cfg.rule = Rule::TC;
  cfg.beta = 1.0;
  ValueLearner model(NTupleNetwork(architecture("42-33"), 0), cfg);
  const Board b = board_from_text("2 4 8 16\n32 64 128 256\n4 8 16 2\n64 2 512 1024\n");
  model.apply(b, 1.0);
  model.apply(b, -1.0);
  int slots = 0, wrong = 0;
  model.network().for_each_tuple(b, [&](std::size_t i, const ViewOffsets& off) {
    for (int v = 0; v < 8; ++v) {
      const auto& acc = model.tc_tables()[i][off[v]];
      ++slots;
      wrong += acc.e == 0.0f && acc.a == 2.0f && tc_rate<double>(acc.e, acc.a) == 0.0 ? 0 : 1;
    }
  });
  ok = ok && wrong == 0;
  return report(6, ok ? kPass : kFail,
                fmt("kernel: E = %g, A = %g, rate = %g; learner: %d of %d slots at E = 0, A = 2", c.e, c.a,
                    tc_rate(c.e, c.a), slots - wrong, slots));
}

int criterion7() {
  NTupleNetwork net(architecture("42-33-4-22-3"), 0);
  fill_uniform(net, 7, 0.0f, 1.0f);
  const NTupleNetwork folded = fold_redundant(net);
  Rng rng(77);
  double worst = 0;
  for (int k = 0; k < 100000; ++k) {
    const Board b(rng());
    worst = std::max(worst, rel_err(net.evaluate(b), folded.evaluate(b)));
  }
  int differ = 0;
  Searcher a(net), b(folded);
  for (Board s : play_positions(1000, 78)) {
    differ += a.choose_move(s, SearchLimit::plies(1)).move == b.choose_move(s, SearchLimit::plies(1)).move ? 0 : 1;
  }
  const bool ok = worst <= 1e-6 && differ == 0;
  return report(7, ok ? kPass : kFail,
                fmt("%s -> %s, max relative value difference %.2e on 1e5 boards (limit 1e-6), %d of 1000 moves differ",
                    net.architecture().name.c_str(), folded.architecture().name.c_str(), worst, differ));
}

int criterion8() {
  NTupleNetwork net(architecture("42-33"), 0);
  fill_uniform(net, 8, 0.0f, 1.0f);
  Searcher cached(net), plain(net, 0);
  double worst = 0, mass = 0;
  std::uint64_t hits = 0;
  int move_diff = 0;
  for (Board s : play_positions(1000, 88)) {
    cached.table().clear();
    const auto x = cached.choose_move(s, SearchLimit::plies(3));
    const auto y = plain.choose_move(s, SearchLimit::plies(3));
    worst = std::max(worst, rel_err(x.value, y.value));
    move_diff += x.move == y.move ? 0 : 1;
  }
  hits = cached.stats().tt_hits;
  mass = std::max(cached.stats().max_mass_error, plain.stats().max_mass_error);
  const bool ok = worst <= 1e-9 && mass < 1e-12;
  return report(8, ok ? kPass : kFail,
                fmt("depth 3 on 1000 positions: max relative difference %.2e (limit 1e-9), %d moves differ, %llu TT hits, "
                    "max chance-mass error %.1e",
                    worst, move_diff, (unsigned long long)hits, mass));
}

// ---------------------------------------------------------------------------
// Scaled training runs shared by criteria 9 and 10.

struct Run {
  std::string rule;
  std::uint64_t seed;
  std::filesystem::path dir() const { return g_work / (rule + "_seed" + std::to_string(seed)); }
};

const std::vector<Run> kRuns = {{"tc", 1}, {"tc", 2}, {"tc", 3}, {"td", 1}, {"td", 2}, {"td", 3}};

RunConfig scaled_config(const Run& r) {
  RunConfig c;
  c.arch = "42-33";
  c.learning.rule = parse_rule(r.rule);
  c.learning.delayed = true;
  c.learning.lambda = 0.5;
  c.learning.alpha = 1.0;
  c.learning.beta = 1.0;
  c.budget.total_actions = 100'000'000;
  c.budget.eval_every = 10'000'000;
  c.budget.eval_games_1ply = 1000;
  c.budget.eval_games_3ply = 0;  // the 3-ply comparison is criterion 10's
  c.budget.workers = 1;
  c.seed = r.seed;
  c.out = r.dir().string();
  return c;
}

bool run_complete(const Run& r) { return std::filesystem::exists(r.dir() / "complete"); }

int train_runs() {
  for (const auto& r : kRuns) {
    if (run_complete(r)) {
      std::fprintf(stderr, "[acceptance] %s already trained\n", r.dir().c_str());
      continue;
    }
    std::filesystem::path ckpt = r.dir() / kCheckpointFile;
    std::optional<Trainer> t;
    if (std::filesystem::exists(ckpt)) {
      try {
        t.emplace(Trainer::resume(ckpt));
        std::fprintf(stderr, "[acceptance] resuming %s at %llu actions\n", r.dir().c_str(),
                     (unsigned long long)t->actions());
      } catch (const std::exception& e) {
        std::fprintf(stderr, "[acceptance] cannot resume %s (%s), restarting\n", r.dir().c_str(), e.what());
      }
    }
    if (!t) t.emplace(scaled_config(r));
    t->set_log(&std::cerr);
    t->run();
    std::ofstream(r.dir() / "complete") << t->actions() << " actions, " << t->train_seconds() << " s\n";
    std::fprintf(stderr, "[acceptance] %s done: %.0f actions/s\n", r.dir().c_str(),
                 static_cast<double>(t->actions()) / t->train_seconds());
  }
  return 0;
}

struct CurvePoint {
  double actions, score1, ci1;
};

std::vector<CurvePoint> read_curve(const Run& r) {
  std::ifstream in(r.dir() / kCurveFile);
  std::string line;
  std::getline(in, line);
  std::vector<CurvePoint> out;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() >= 4) out.push_back({v[0], v[2], v[3]});
  }
  return out;
}

bool runs_ready(int n) {
  for (const auto& r : kRuns) {
    if (!run_complete(r)) {
      report(n, kFail, "training runs missing under " + g_work.string() + " (run `n2048_acceptance train`)");
      return false;
    }
  }
  return true;
}

int criterion9() {
  if (!runs_ready(9)) return kFail;
  const NTupleNetwork zero(architecture("42-33"), 0);
  const auto base = evaluate_games(zero, SearchLimit::plies(1), 1000, 9);
  std::string details = fmt("zero-network 1-ply mean %.0f;", base.score.mean);
  bool a_ok = true, b_ok = true;
  int tc_wins = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto tc = read_curve({"tc", seed});
    const auto td = read_curve({"td", seed});
    if (tc.empty() || td.empty()) return report(9, kFail, "empty curve for seed " + std::to_string(seed));
    int dips = 0;
    double worst_dip = 0;
    for (std::size_t k = 1; k < tc.size(); ++k) {
      if (tc[k].score1 < tc[k - 1].score1) {
        ++dips;
        worst_dip = std::max(worst_dip, 1.0 - tc[k].score1 / tc[k - 1].score1);
      }
    }
    const bool a = dips == 0 || (dips == 1 && worst_dip <= 0.10);
    const bool b = tc.back().score1 > 20.0 * base.score.mean;
    const bool c = tc.back().score1 > td.back().score1;
    a_ok = a_ok && a;
    b_ok = b_ok && b;
    tc_wins += c ? 1 : 0;
    details += fmt(" seed %llu: TC %.0f +- %.0f vs TD %.0f +- %.0f, %d dips (worst %.1f%%);", (unsigned long long)seed,
                   tc.back().score1, tc.back().ci1, td.back().score1, td.back().ci1, dips, 100 * worst_dip);
  }
  // Sign test over the seeds: TC must win every pairing.
  details += fmt(" (a) curve %s, (b) >20x baseline %s, (c) TC > TD in %d/3", a_ok ? "ok" : "FAILED", b_ok ? "ok" : "FAILED",
                 tc_wins);
  return report(9, a_ok && b_ok && tc_wins == 3 ? kPass : kFail, details);
}

int criterion10() {
  if (!runs_ready(10)) return kFail;
  int holds = 0;
  std::string details;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Run r{"tc", seed};
    const auto curve = read_curve(r);
    const NTupleNetwork net = load_network(r.dir() / kNetworkFile);
    const auto t0 = std::chrono::steady_clock::now();
    const auto three = evaluate_games(net, SearchLimit::plies(3), 300, 1000 + seed);
    const double one = curve.back().score1;
    holds += three.score.mean >= one ? 1 : 0;
    details += fmt(" seed %llu: 3-ply %.0f +- %.0f (300 games, %.0f s) vs 1-ply %.0f +- %.0f (1000 games);",
                   (unsigned long long)seed, three.score.mean, three.score.ci95, seconds_since(t0), one,
                   curve.back().ci1);
  }
  return report(10, holds >= 2 ? kPass : kFail, fmt("holds in %d/3 seeds (need 2);", holds) + details);
}

int criterion11() {
  NTupleNetwork net(architecture("42-33"), 0);
  const Run trained{"tc", 1};
  std::string source = "random-weight 42-33";
  if (run_complete(trained)) {
    net = load_network(trained.dir() / kNetworkFile);
    source = "trained 42-33";
  } else {
    fill_uniform(net, 11, 0.0f, 1.0f);
  }
  std::uint64_t moves = 0;
  int games = 0;
  const auto t0 = std::chrono::steady_clock::now();
  while (seconds_since(t0) < 5.0) {
    moves += play_game(net, SearchLimit::plies(1), game_seed(11, static_cast<std::uint64_t>(games))).moves;
    ++games;
  }
  const double rate = static_cast<double>(moves) / seconds_since(t0);
  return report(11, rate >= 50000 ? kPass : kFail,
                fmt("%s, 1 worker: %.0f moves/s over %d games (need 50000)", source.c_str(), rate, games));
}

int criterion12() {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int workers = std::max(2, std::min(8, hw));
  auto throughput = [](int w) {
    RunConfig c;
    c.arch = "42-33";
    c.budget.total_actions = 5'000'000;
    c.budget.eval_every = 0;
    c.budget.workers = w;
    c.seed = 12;
    Trainer t(c);
    t.run();
    return static_cast<double>(t.actions()) / t.train_seconds();
  };
  const double one = throughput(1);
  const double many = throughput(workers);
  const double speedup = many / one;
  const std::string measured =
      fmt("W=1 %.0f actions/s, W=%d %.0f actions/s, speedup %.2fx (need 4x at W=8)", one, workers, many, speedup);
  if (hw < 8) {
    return report(12, kSkip, fmt("only %d hardware thread(s), need 8; measured ", hw) + measured);
  }
  // Quality: a W=8 scaled run lands inside the W=1 run's final 95% CI.
  const Run ref{"tc", 1};
  if (!run_complete(ref)) return report(12, kFail, measured + "; W=1 reference run missing");
  auto cfg = scaled_config(ref);
  cfg.budget.workers = 8;
  cfg.out = (g_work / "tc_seed1_w8").string();
  Trainer t(cfg);
  t.run();
  const auto w1 = read_curve(ref).back();
  const auto w8 = t.curve().back().score1;
  const bool quality = std::abs(w8.mean - w1.score1) <= w1.ci1;
  return report(12, speedup >= 4.0 && quality ? kPass : kFail,
                measured + fmt("; final 1-ply W=8 %.0f vs W=1 %.0f +- %.0f", w8.mean, w1.score1, w1.ci1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"n2048 acceptance checks"};
  std::string which;
  std::string work;
  app.add_option("criterion", which, "1..12 or train")->required();
  app.add_option("--work", work, "directory for the scaled training runs");
  CLI11_PARSE(app, argc, argv);
  if (work.empty()) {
    const char* env = std::getenv("N2048_ACCEPTANCE_WORK");
    work = env ? env : (std::filesystem::temp_directory_path() / "n2048_acceptance").string();
  }
  g_work = work;
  std::filesystem::create_directories(g_work);

  try {
    if (which == "train") return train_runs();
    const std::map<std::string, int (*)()> table = {
        {"1", criterion1}, {"2", criterion2},   {"3", criterion3},   {"4", criterion4},
        {"5", criterion5}, {"6", criterion6},   {"7", criterion7},   {"8", criterion8},
        {"9", criterion9}, {"10", criterion10}, {"11", criterion11}, {"12", criterion12},
    };
    const auto it = table.find(which);
    if (it == table.end()) {
      std::fprintf(stderr, "unknown criterion %s\n", which.c_str());
      return 2;
    }
    return it->second();
  } catch (const std::exception& e) {
    std::printf("criterion %s: FAIL  exception: %s\n", which.c_str(), e.what());
    return kFail;
  }
}
