// Serial reference vs optimised/parallel kernels: slide tables, game-parallel
// evaluation and multi-worker training.

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "../tests/oracle.hpp"
#include "n2048/architecture.hpp"
#include "n2048/stats.hpp"
#include "n2048/trainer.hpp"

using namespace n2048;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_slide(int n) {
  Rng rng(7);
  std::vector<Board> boards(static_cast<std::size_t>(n));
  for (auto& b : boards) b = Board(rng());
  std::uint64_t sink = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (Board b : boards)
    for (Move m : kMoves) sink += slide(b, m).afterstate.bits();
  const double fast = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  std::uint64_t sink_ref = 0;
  for (Board b : boards)
    for (Move m : kMoves) sink_ref += oracle::slide(b, m).after.bits();
  const double ref = seconds_since(t0);
  std::printf("slide      table %.1f Mmoves/s  reference %.1f Mmoves/s  speedup %.1fx  %s\n", 4e-6 * n / fast,
              4e-6 * n / ref, ref / fast, sink == sink_ref ? "match" : "MISMATCH");
}

void bench_eval(int games, int threads) {
  NTupleNetwork net(architecture("42-33"), 0);
  Rng rng(3);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (std::size_t i = 0; i < net.tuple_count(); ++i)
    for (float& w : net.table(i)) w = u(rng);
  const auto limit = SearchLimit::plies(1);
  const auto serial = evaluate_games_serial(net, limit, games, 11);
  const auto par = evaluate_games(net, limit, games, 11, threads);
  bool same = serial.games.size() == par.games.size();
  for (std::size_t i = 0; same && i < serial.games.size(); ++i)
    same = serial.games[i].score == par.games[i].score && serial.games[i].moves == par.games[i].moves;
  std::printf("evaluate   serial %.2f s  omp(%d) %.2f s  speedup %.2fx  %s\n", serial.wall_s, threads, par.wall_s,
              serial.wall_s / par.wall_s, same ? "match" : "MISMATCH");
}

void bench_train(std::uint64_t actions, int workers) {
  auto run = [&](int w) {
    RunConfig cfg;
    cfg.budget.total_actions = actions;
    cfg.budget.eval_every = 0;
    cfg.budget.workers = w;
    Trainer t(cfg);
    t.run();
    return static_cast<double>(t.actions()) / t.train_seconds();
  };
  const double one = run(1);
  const double many = run(workers);
  std::printf("train      W=1 %.0f actions/s  W=%d %.0f actions/s  speedup %.2fx\n", one, workers, many, many / one);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"n2048 benchmarks"};
  int boards = 1'000'000;
  int games = 200;
  std::uint64_t actions = 2'000'000;
  int threads = omp_get_max_threads();
  app.add_option("--boards", boards, "boards for the slide benchmark");
  app.add_option("--games", games, "1-ply games for the evaluation benchmark");
  app.add_option("--actions", actions, "training actions per run");
  app.add_option("--threads", threads, "parallel workers");
  CLI11_PARSE(app, argc, argv);
  std::printf("hardware threads: %d\n", omp_get_num_procs());
  bench_slide(boards);
  bench_eval(games, threads);
  bench_train(actions, threads);
  return 0;
}
