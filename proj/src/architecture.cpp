#include "n2048/architecture.hpp"

#include <algorithm>
#include <stdexcept>

namespace n2048 {

namespace {

using Perm = std::array<std::uint8_t, 16>;

constexpr std::array<Perm, 8> make_symmetries() {
  Perm rot{};
  Perm mirror{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      rot[r * 4 + c] = static_cast<std::uint8_t>((3 - c) * 4 + r);
      mirror[r * 4 + c] = static_cast<std::uint8_t>(r * 4 + 3 - c);
    }
  }
  std::array<Perm, 8> out{};
  Perm cur{};
  for (int i = 0; i < 16; ++i) cur[i] = static_cast<std::uint8_t>(i);
  for (int k = 0; k < 4; ++k) {
    out[k] = cur;
    for (int i = 0; i < 16; ++i) out[4 + k][i] = mirror[cur[i]];
    Perm next{};
    for (int i = 0; i < 16; ++i) next[i] = cur[rot[i]];
    cur = next;
  }
  return out;
}

constexpr std::array<Perm, 8> invert_all(const std::array<Perm, 8>& perms) {
  std::array<Perm, 8> out{};
  for (int v = 0; v < 8; ++v) {
    for (int i = 0; i < 16; ++i) out[v][perms[v][i]] = static_cast<std::uint8_t>(i);
  }
  return out;
}

constexpr auto kInversePerm = invert_all(make_symmetries());

Board permute(Board b, const Perm& p) {
  std::uint64_t out = 0;
  for (int c = 0; c < 16; ++c) out |= static_cast<std::uint64_t>(b.cell(p[c])) << (4 * c);
  return Board(out);
}

TupleShape shape(std::string kind, std::vector<std::uint8_t> cells, bool redundant = false) {
  return TupleShape{std::move(kind), std::move(cells), redundant, std::nullopt};
}

std::vector<TupleShape> base_42_33() {
  return {
      shape("42", {0, 1, 2, 3, 4, 5}),
      shape("42", {4, 5, 6, 7, 8, 9}),
      shape("33", {0, 1, 2, 4, 5, 6}),
      shape("33", {4, 5, 6, 8, 9, 10}),
  };
}

std::vector<TupleShape> base_42_33_five() {
  auto t = base_42_33();
  t.push_back(shape("42", {4, 5, 6, 7, 0, 1}));
  return t;
}

void add_4_22(std::vector<TupleShape>& t) {
  t.push_back(shape("4", {0, 1, 2, 3}, true));
  t.push_back(shape("4", {4, 5, 6, 7}, true));
  t.push_back(shape("22", {0, 1, 4, 5}, true));
  t.push_back(shape("22", {1, 2, 5, 6}, true));
  t.push_back(shape("22", {5, 6, 9, 10}, true));
}

void add_3(std::vector<TupleShape>& t) {
  t.push_back(shape("3", {0, 1, 2}, true));
  t.push_back(shape("3", {4, 5, 6}, true));
}

struct Entry {
  std::string_view name;
  std::vector<TupleShape> (*make)();
};

const std::array<Entry, 6> kRegistry = {{
    {"42-33", [] { return base_42_33(); }},
    {"42-33-5", [] { return base_42_33_five(); }},
    {"421-43",
     [] {
       return std::vector<TupleShape>{
           shape("43", {0, 1, 2, 3, 4, 5, 6}),
           shape("43", {4, 5, 6, 7, 8, 9, 10}),
           shape("421", {0, 1, 2, 3, 4, 5, 8}),
           shape("421", {4, 5, 6, 7, 8, 9, 12}),
           shape("43", {4, 5, 6, 7, 0, 1, 2}),
       };
     }},
    {"42-33-4-22",
     [] {
       auto t = base_42_33_five();
       add_4_22(t);
       return t;
     }},
    {"42-33-4-22-3",
     [] {
       auto t = base_42_33_five();
       add_4_22(t);
       add_3(t);
       return t;
     }},
    {"4-22-3",
     [] {
       // Small all-retained network for fast experiments and tests.
       return std::vector<TupleShape>{
           shape("4", {0, 1, 2, 3}),
           shape("4", {4, 5, 6, 7}),
           shape("22", {0, 1, 4, 5}),
           shape("22", {1, 2, 5, 6}),
           shape("22", {5, 6, 9, 10}),
           shape("3", {0, 1, 2}),
       };
     }},
}};

}  // namespace

const std::array<std::array<std::uint8_t, 16>, 8> kSymmetryPerm = make_symmetries();

Board apply_view(Board board, int view) { return permute(board, kSymmetryPerm[view]); }

Board apply_inverse_view(Board board, int view) { return permute(board, kInversePerm[view]); }

std::array<Board, 8> symmetric_views(Board board) {
  std::array<Board, 8> out{};
  for (int v = 0; v < 8; ++v) out[v] = apply_view(board, v);
  return out;
}

std::uint64_t Architecture::parameter_count(int stage_bits) const {
  std::uint64_t per_stage = 0;
  for (const auto& t : tuples) per_stage += table_size_for(t.length());
  return per_stage << stage_bits;
}

std::size_t Architecture::retained_count() const {
  return static_cast<std::size_t>(std::count_if(tuples.begin(), tuples.end(), [](const auto& t) { return !t.redundant; }));
}

bool Architecture::same_geometry(const Architecture& other) const {
  if (tuples.size() != other.tuples.size()) return false;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (tuples[i].cells != other.tuples[i].cells || tuples[i].redundant != other.tuples[i].redundant) return false;
  }
  return true;
}

std::optional<Containment> find_containment(const TupleShape& redundant, const TupleShape& parent) {
  for (int v = 0; v < 8; ++v) {
    Containment c{v, {}};
    bool ok = true;
    for (auto cell : redundant.cells) {
      const auto mapped = kSymmetryPerm[v][cell];
      const auto it = std::find(parent.cells.begin(), parent.cells.end(), mapped);
      if (it == parent.cells.end()) {
        ok = false;
        break;
      }
      c.positions.push_back(static_cast<std::uint8_t>(it - parent.cells.begin()));
    }
    if (ok) return c;
  }
  return std::nullopt;
}

void resolve_fold_parents(std::vector<TupleShape>& tuples) {
  if (tuples.size() > 0xFFFE) throw std::invalid_argument("too many tuples");
  for (const auto& t : tuples) {
    if (t.cells.empty() || t.cells.size() > 8) throw std::invalid_argument("tuple length out of range");
    auto sorted = t.cells;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("tuple locations are not distinct");
    }
    if (sorted.back() > 15) throw std::invalid_argument("tuple location out of range");
  }
  for (auto& t : tuples) {
    t.fold_parent.reset();
    if (!t.redundant) continue;
    for (std::size_t p = 0; p < tuples.size(); ++p) {
      if (tuples[p].redundant) continue;
      if (find_containment(t, tuples[p])) {
        t.fold_parent = static_cast<std::uint16_t>(p);
        break;
      }
    }
  }
}

Architecture architecture(std::string_view name) {
  for (const auto& e : kRegistry) {
    if (e.name == name) {
      Architecture a{std::string(name), e.make()};
      resolve_fold_parents(a.tuples);
      return a;
    }
  }
  throw std::invalid_argument("unknown architecture: " + std::string(name));
}

std::vector<std::string> architecture_names() {
  std::vector<std::string> names;
  for (const auto& e : kRegistry) names.emplace_back(e.name);
  return names;
}

std::optional<std::string> identify_architecture(const std::vector<TupleShape>& tuples) {
  Architecture probe{"", tuples};
  for (const auto& e : kRegistry) {
    if (architecture(e.name).same_geometry(probe)) return std::string(e.name);
  }
  return std::nullopt;
}

}  // namespace n2048
