// n2048: train, evaluate, fold and inspect n-tuple networks for 2048.
//
// Machine-readable output (JSON, CSV) goes to stdout, logs to stderr.
// Exit codes: 0 ok, 2 usage, 3 I/O, 4 format.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "n2048/architecture.hpp"
#include "n2048/errors.hpp"
#include "n2048/network_io.hpp"
#include "n2048/run_config.hpp"
#include "n2048/stats.hpp"
#include "n2048/trainer.hpp"

using namespace n2048;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;
constexpr const char* kOutEnv = "N2048_OUT_DIR";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training options kept as raw text so only flags the user gave override
// the config file.
struct TrainArgs {
  std::string config_file;
  std::string resume;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::map<std::string, std::string> values;
  CLI::Option* delayed = nullptr;
  CLI::Option* promotion = nullptr;
  CLI::Option* carousel = nullptr;
  bool delayed_on = true;
  bool promotion_on = false;
  bool carousel_on = false;
  int eval_threads = 0;
  bool quiet = false;
};

void add_value(CLI::App* cmd, TrainArgs& a, const std::string& flag, const std::string& key, const std::string& help) {
  auto* opt = cmd->add_option(flag, a.values[key], help);
  a.options.emplace_back(key, opt);
}

std::string ensure_out(std::string out) {
  if (out.empty()) {
    if (const char* env = std::getenv(kOutEnv)) out = env;
  }
  if (out.empty()) throw UsageError(std::string("--out is required (or set ") + kOutEnv + ")");
  return out;
}

int cmd_train(TrainArgs& a) {
  auto apply_flags = [&](RunConfig& cfg) {
    for (const auto& [key, opt] : a.options) {
      if (opt->count() > 0) set_option(cfg, key, a.values[key]);
    }
    if (a.delayed->count() > 0) cfg.learning.delayed = a.delayed_on;
    if (a.promotion->count() > 0) cfg.learning.weight_promotion = a.promotion_on;
    if (a.carousel->count() > 0) cfg.learning.carousel = a.carousel_on;
  };

  std::optional<Trainer> trainer;
  if (!a.resume.empty()) {
    std::optional<std::string> arch;
    for (const auto& [key, opt] : a.options) {
      if (key == "arch" && opt->count() > 0) arch = a.values[key];
    }
    trainer.emplace(Trainer::resume(a.resume, arch));
    for (const auto& [key, opt] : a.options) {
      if (opt->count() == 0) continue;
      if (key == "budget") {
        RunConfig tmp = trainer->config();
        set_option(tmp, key, a.values[key]);
        trainer->set_total_actions(tmp.budget.total_actions);
      } else if (key == "out") {
        trainer->set_out_dir(a.values[key]);
      } else if (key != "arch") {
        throw UsageError("--" + key + " cannot be changed when resuming");
      }
    }
    trainer->set_out_dir(ensure_out(trainer->config().out));
  } else {
    RunConfig cfg;
    if (!a.config_file.empty()) cfg = load_config(a.config_file);
    apply_flags(cfg);
    cfg.out = ensure_out(cfg.out);
    cfg.validate();
    trainer.emplace(cfg);
  }
  trainer->set_eval_threads(a.eval_threads);
  if (!a.quiet) trainer->set_log(&std::cerr);
  std::cerr << "[train] resolved config:\n" << to_kv(trainer->config());
  trainer->run();
  std::cerr << "[train] done: actions=" << trainer->actions() << " episodes=" << trainer->episodes()
            << " train_s=" << trainer->train_seconds() << " out=" << trainer->config().out << '\n';
  return 0;
}

struct EvalArgs {
  std::string network;
  int depth = 0;
  double ms = 0;
  int games = 100;
  std::uint64_t seed = 1;
  std::string csv;
  int threads = 0;
};

int cmd_eval(const EvalArgs& a) {
  if (a.depth > 0 && a.ms > 0) throw UsageError("--depth and --ms are exclusive");
  if (a.games < 0) throw UsageError("--games must be >= 0");
  const SearchLimit limit = a.ms > 0 ? SearchLimit::millis(a.ms) : SearchLimit::plies(a.depth > 0 ? a.depth : 1);
  const NTupleNetwork network = load_network(a.network);
  const EvalReport report = evaluate_games(network, limit, a.games, a.seed, a.threads);
  if (!a.csv.empty()) {
    std::ofstream out(a.csv, std::ios::trunc);
    if (!out) throw IoError("cannot write " + a.csv);
    out << csv_header() << '\n';
    for (const auto& g : report.games) out << to_csv(g) << '\n';
    if (!out) throw IoError("write failed: " + a.csv);
  }
  json j;
  j["network"] = a.network;
  j["architecture"] = network.architecture().name;
  j["stages"] = network.stage_count();
  if (limit.mode == SearchLimit::Mode::Time) {
    j["ms_per_move_limit"] = limit.time_ms;
  } else {
    j["depth"] = limit.depth;
  }
  j["seed"] = a.seed;
  j["games"] = report.games.size();
  j["score_mean"] = report.score.mean;
  j["score_ci95"] = report.score.ci95;
  j["score_sd"] = report.score.sd;
  j["pct_32768"] = report.pct_32768;
  j["pct_16384"] = report.pct_16384;
  j["pct_8192"] = report.pct_8192;
  j["moves_per_s"] = report.moves_per_s;
  j["wall_s"] = report.wall_s;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_fold(const std::string& in, const std::string& out) {
  const NTupleNetwork network = load_network(in);
  const NTupleNetwork folded = fold_redundant(network);
  save_network(folded, out);
  std::cerr << "[fold] " << network.architecture().name << " (" << network.tuple_count() << " tuples) -> "
            << folded.architecture().name << " (" << folded.tuple_count() << " tuples)\n";
  json j;
  j["input"] = in;
  j["output"] = out;
  j["architecture"] = folded.architecture().name;
  j["tuples"] = folded.tuple_count();
  j["parameter_count"] = folded.parameter_count();
  std::cout << j.dump(2) << '\n';
  return 0;
}

json describe(const Architecture& arch, int stage_bits) {
  json j;
  j["architecture"] = arch.name;
  j["stages"] = 1 << stage_bits;
  j["parameter_count"] = arch.parameter_count(stage_bits);
  j["retained_tuples"] = arch.retained_count();
  json tuples = json::array();
  for (const auto& t : arch.tuples) {
    json jt;
    jt["cells"] = t.cells;
    jt["redundant"] = t.redundant;
    if (t.fold_parent) jt["fold_parent"] = *t.fold_parent;
    tuples.push_back(jt);
  }
  j["tuples"] = tuples;
  return j;
}

struct InspectArgs {
  std::string file;
  std::string arch;
  int stages = 0;
  std::string board;
};

int cmd_inspect(const InspectArgs& a) {
  if (a.file.empty() && a.arch.empty() && a.board.empty()) throw UsageError("inspect needs FILE, --arch or --board");
  if (!a.file.empty() && !a.arch.empty()) throw UsageError("give either FILE or --arch");
  json j;
  std::optional<NTupleNetwork> network;
  if (!a.file.empty()) {
    network.emplace(load_network(a.file));
    j = describe(network->architecture(), network->stage_bits());
    j["file"] = a.file;
  } else if (!a.arch.empty()) {
    if (a.stages < 0 || a.stages > kMaxStageBits) throw UsageError("--stages must be in [0, 5]");
    j = describe(architecture(a.arch), a.stages);
  }
  if (!a.board.empty()) {
    std::ifstream in(a.board);
    if (!in) throw IoError("cannot read " + a.board);
    std::stringstream ss;
    ss << in.rdbuf();
    Board b;
    try {
      b = board_from_text(ss.str());
    } catch (const std::invalid_argument& err) {
      throw FormatError(a.board + ": " + err.what());
    }
    json jb;
    jb["text"] = to_text(b);
    jb["empty_cells"] = b.empty_count();
    jb["max_tile"] = b.max_exponent() ? 1U << b.max_exponent() : 0U;
    jb["terminal"] = is_terminal(b);
    json moves = json::array();
    for (Move m : kMoves) {
      const auto out = slide(b, m);
      if (!out.legal) continue;
      json jm;
      jm["move"] = std::string(to_string(m));
      jm["reward"] = out.reward;
      if (network) jm["value"] = out.reward + network->evaluate(out.afterstate);
      moves.push_back(jm);
    }
    jb["legal_moves"] = moves;
    if (network) {
      jb["stage"] = stage_of(b, network->stage_bits());
      jb["value"] = network->evaluate(b);
    }
    j["board"] = jb;
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"n-tuple network learning and play for 2048"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train a network");
  t->add_option("--config", train.config_file, "key=value config file; flags override it");
  t->add_option("--resume", train.resume, "continue from a checkpoint file");
  add_value(t, train, "--arch", "arch", "architecture name");
  add_value(t, train, "--rule", "rule", "td | tc | autostep");
  add_value(t, train, "--lambda", "lambda", "trace decay");
  add_value(t, train, "--alpha", "alpha", "TD learning rate");
  add_value(t, train, "--beta", "beta", "TC meta learning rate");
  add_value(t, train, "--mu", "mu", "Autostep meta learning rate");
  add_value(t, train, "--tau", "tau", "Autostep normaliser rate");
  add_value(t, train, "--alpha-init", "alpha_init", "Autostep initial step size");
  add_value(t, train, "--stages", "stages", "g: the network has 2^g stages");
  add_value(t, train, "--budget", "budget", "total actions");
  add_value(t, train, "--eval-every", "eval_every", "actions between evaluation ticks (0: none)");
  add_value(t, train, "--eval-games-1ply", "eval_games_1ply", "1-ply games per tick");
  add_value(t, train, "--eval-games-3ply", "eval_games_3ply", "3-ply games per tick");
  add_value(t, train, "--workers", "workers", "training threads");
  add_value(t, train, "--seed", "seed", "RNG seed");
  add_value(t, train, "--out", "out", std::string("output directory (default $") + kOutEnv + ")");
  train.delayed = t->add_flag("--delayed,!--no-delayed", train.delayed_on, "delayed updates");
  train.promotion = t->add_flag("--weight-promotion,!--no-weight-promotion", train.promotion_on, "weight promotion");
  train.carousel = t->add_flag("--carousel,!--no-carousel", train.carousel_on, "carousel shaping");
  t->add_option("--eval-threads", train.eval_threads, "threads for evaluation ticks (0: all)");
  t->add_flag("--quiet", train.quiet, "no per-tick progress on stderr");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "play evaluation games");
  e->add_option("network", ev.network, "network file")->required();
  e->add_option("--depth", ev.depth, "fixed search depth in plies (default 1)");
  e->add_option("--ms", ev.ms, "time budget per move in milliseconds");
  e->add_option("--games", ev.games, "number of games");
  e->add_option("--seed", ev.seed, "base seed");
  e->add_option("--csv", ev.csv, "write per-game rows to this file");
  e->add_option("--threads", ev.threads, "threads (0: all)");

  std::string fold_in, fold_out;
  auto* f = app.add_subcommand("fold", "fold redundant tuples into retained ones");
  f->add_option("input", fold_in, "network file")->required();
  f->add_option("output", fold_out, "folded network file")->required();

  InspectArgs in;
  auto* i = app.add_subcommand("inspect", "print network, architecture or board metadata");
  i->add_option("file", in.file, "network file");
  i->add_option("--arch", in.arch, "architecture name");
  i->add_option("--stages", in.stages, "g for --arch");
  i->add_option("--board", in.board, "text board file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*t) return cmd_train(train);
    if (*e) return cmd_eval(ev);
    if (*f) return cmd_fold(fold_in, fold_out);
    if (*i) return cmd_inspect(in);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const IoError& err) {
    std::cerr << "I/O error: " << err.what() << '\n';
    return kExitIo;
  } catch (const FormatError& err) {
    std::cerr << "format error: " << err.what() << '\n';
    return kExitFormat;
  } catch (const std::invalid_argument& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
