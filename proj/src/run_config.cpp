#include "n2048/run_config.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "n2048/architecture.hpp"
#include "n2048/errors.hpp"

namespace n2048 {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_integer(std::string_view key, std::string_view v) {
  T out{};
  // Accept 1e8-style budgets as well as plain integers.
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && p == v.data() + v.size()) return out;
  double d = 0;
  const auto [q, ec2] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec2 == std::errc() && q == v.data() + v.size() && d >= 0 && d == static_cast<double>(static_cast<T>(d))) {
    return static_cast<T>(d);
  }
  throw ConfigError("invalid integer for " + std::string(key) + ": " + std::string(v));
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("invalid number for " + std::string(key) + ": " + std::string(v));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean for " + std::string(key) + ": " + std::string(v));
}

}  // namespace

void RunConfig::validate() const {
  try {
    (void)architecture(arch);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  learning.validate();
  if (budget.workers < 1) throw ConfigError("workers must be >= 1");
  if (budget.eval_games_1ply < 0 || budget.eval_games_3ply < 0) throw ConfigError("eval game counts must be >= 0");
}

void set_option(RunConfig& c, std::string_view key, std::string_view raw) {
  const auto v = trim(raw);
  auto& l = c.learning;
  if (key == "arch") c.arch = std::string(v);
  else if (key == "rule") l.rule = parse_rule(v);
  else if (key == "delayed") l.delayed = parse_bool(key, v);
  else if (key == "lambda") l.lambda = parse_real(key, v);
  else if (key == "alpha") l.alpha = parse_real(key, v);
  else if (key == "beta") l.beta = parse_real(key, v);
  else if (key == "mu") l.autostep.mu = parse_real(key, v);
  else if (key == "tau") l.autostep.tau = parse_real(key, v);
  else if (key == "alpha_init") l.autostep.alpha_init = parse_real(key, v);
  else if (key == "stages") l.stage_bits = parse_integer<int>(key, v);
  else if (key == "weight_promotion") l.weight_promotion = parse_bool(key, v);
  else if (key == "carousel") l.carousel = parse_bool(key, v);
  else if (key == "budget") c.budget.total_actions = parse_integer<std::uint64_t>(key, v);
  else if (key == "eval_every") c.budget.eval_every = parse_integer<std::uint64_t>(key, v);
  else if (key == "eval_games_1ply") c.budget.eval_games_1ply = parse_integer<int>(key, v);
  else if (key == "eval_games_3ply") c.budget.eval_games_3ply = parse_integer<int>(key, v);
  else if (key == "workers") c.budget.workers = parse_integer<int>(key, v);
  else if (key == "seed") c.seed = parse_integer<std::uint64_t>(key, v);
  else if (key == "out") c.out = std::string(v);
  else throw ConfigError("unknown config key: " + std::string(key));
}

std::string to_kv(const RunConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto& l = c.learning;
  os << "arch=" << c.arch << '\n'
     << "rule=" << to_string(l.rule) << '\n'
     << "delayed=" << (l.delayed ? "true" : "false") << '\n'
     << "lambda=" << l.lambda << '\n'
     << "alpha=" << l.alpha << '\n'
     << "beta=" << l.beta << '\n'
     << "mu=" << l.autostep.mu << '\n'
     << "tau=" << l.autostep.tau << '\n'
     << "alpha_init=" << l.autostep.alpha_init << '\n'
     << "stages=" << l.stage_bits << '\n'
     << "weight_promotion=" << (l.weight_promotion ? "true" : "false") << '\n'
     << "carousel=" << (l.carousel ? "true" : "false") << '\n'
     << "budget=" << c.budget.total_actions << '\n'
     << "eval_every=" << c.budget.eval_every << '\n'
     << "eval_games_1ply=" << c.budget.eval_games_1ply << '\n'
     << "eval_games_3ply=" << c.budget.eval_games_3ply << '\n'
     << "workers=" << c.budget.workers << '\n'
     << "seed=" << c.seed << '\n'
     << "out=" << c.out << '\n';
  return os.str();
}

RunConfig parse_kv(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    set_option(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kv(ss.str(), std::move(base));
}

}  // namespace n2048
