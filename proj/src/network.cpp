#include "n2048/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace n2048 {

std::uint64_t tuple_index(Board board, const TupleShape& shape) {
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < shape.cells.size(); ++j) {
    idx |= static_cast<std::uint64_t>(board.cell(shape.cells[j])) << (4 * j);
  }
  return idx;
}

double order_free_sum(std::array<float, 8> v) {
  // Batcher odd-even merge sort network for 8 inputs.
  constexpr std::array<std::array<int, 2>, 19> kPairs = {{{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 2}, {1, 3}, {4, 6},
                                                          {5, 7}, {1, 2}, {5, 6}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
                                                          {2, 4}, {3, 5}, {1, 2}, {3, 4}, {5, 6}}};
  for (const auto& [a, b] : kPairs) {
    const float lo = std::min(v[a], v[b]);
    const float hi = std::max(v[a], v[b]);
    v[a] = lo;
    v[b] = hi;
  }
  double s = 0;
  for (float x : v) s += x;
  return s;
}

NTupleNetwork::NTupleNetwork(Architecture arch, int stage_bits) : arch_(std::move(arch)), stage_bits_(stage_bits) {
  if (stage_bits < 0 || stage_bits > kMaxStageBits) throw std::invalid_argument("stage bits out of range");
  if (arch_.tuples.empty()) throw std::invalid_argument("architecture has no tuples");
  resolve_fold_parents(arch_.tuples);
  for (const auto& t : arch_.tuples) {
    if (t.length() > 8) throw std::invalid_argument("tuple too long");
    stage_size_.push_back(table_size_for(t.length()));
    std::array<Locations, 8> views{};
    for (int v = 0; v < 8; ++v) {
      views[v].n = static_cast<std::uint8_t>(t.length());
      for (std::size_t j = 0; j < t.length(); ++j) {
        views[v].shift[j] = static_cast<std::uint8_t>(4 * kSymmetryPerm[v][t.cells[j]]);
      }
    }
    expanded_.push_back(views);
    tables_.emplace_back(stage_size_.back() << stage_bits_, 0.0f);
  }
}

std::span<float> NTupleNetwork::table(std::size_t tuple, int stage) {
  return std::span<float>(tables_[tuple]).subspan(static_cast<std::uint64_t>(stage) * stage_size_[tuple],
                                                  stage_size_[tuple]);
}

std::span<const float> NTupleNetwork::table(std::size_t tuple, int stage) const {
  return std::span<const float>(tables_[tuple])
      .subspan(static_cast<std::uint64_t>(stage) * stage_size_[tuple], stage_size_[tuple]);
}

double NTupleNetwork::evaluate(Board board) const {
  double total = 0;
  for_each_tuple(board, [&](std::size_t i, const ViewOffsets& off) {
    const float* t = tables_[i].data();
    std::array<float, 8> vals;
    for (int v = 0; v < 8; ++v) vals[v] = relaxed_load(t[off[v]]);
    total += order_free_sum(vals);
  });
  return total;
}

std::vector<WeightRef> NTupleNetwork::weight_refs(Board board) const {
  std::vector<WeightRef> refs;
  refs.reserve(static_cast<std::size_t>(view_count()));
  const int stage = stage_of(board, stage_bits_);
  for_each_tuple(board, stage, [&](std::size_t i, const ViewOffsets& off) {
    for (int v = 0; v < 8; ++v) {
      const std::uint64_t base = static_cast<std::uint64_t>(stage) * stage_size_[i];
      refs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(stage), off[v] - base});
    }
  });
  return refs;
}

bool NTupleNetwork::operator==(const NTupleNetwork& other) const {
  return stage_bits_ == other.stage_bits_ && arch_.same_geometry(other.arch_) && tables_ == other.tables_;
}

NTupleNetwork fold_redundant(const NTupleNetwork& network) {
  const auto& tuples = network.architecture().tuples;
  std::vector<int> new_id(tuples.size(), -1);
  Architecture folded_arch;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (tuples[i].redundant) continue;
    new_id[i] = static_cast<int>(folded_arch.tuples.size());
    auto t = tuples[i];
    t.fold_parent.reset();
    folded_arch.tuples.push_back(std::move(t));
  }
  if (folded_arch.tuples.empty()) throw std::invalid_argument("fold_redundant: no retained tuples");
  folded_arch.name = identify_architecture(folded_arch.tuples).value_or(network.architecture().name + "/folded");

  NTupleNetwork out(folded_arch, network.stage_bits());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (new_id[i] >= 0) {
      const auto src = network.table(i);
      std::copy(src.begin(), src.end(), out.table(static_cast<std::size_t>(new_id[i])).begin());
    }
  }
  for (std::size_t r = 0; r < tuples.size(); ++r) {
    if (!tuples[r].redundant) continue;
    if (!tuples[r].fold_parent) {
      throw std::invalid_argument("fold_redundant: redundant tuple " + std::to_string(r) +
                                  " is not contained in any retained tuple");
    }
    const std::size_t parent = *tuples[r].fold_parent;
    const auto containment = find_containment(tuples[r], tuples[parent]);
    if (!containment) throw std::invalid_argument("fold_redundant: stale fold parent");
    const auto& pos = containment->positions;
    const auto target_id = static_cast<std::size_t>(new_id[parent]);
    for (int s = 0; s < network.stage_count(); ++s) {
      const auto src = network.table(r, s);
      auto dst = out.table(target_id, s);
      for (std::uint64_t idx = 0; idx < dst.size(); ++idx) {
        std::uint64_t ridx = 0;
        for (std::size_t j = 0; j < pos.size(); ++j) ridx |= ((idx >> (4 * pos[j])) & 0xF) << (4 * j);
        dst[idx] = static_cast<float>(static_cast<double>(dst[idx]) + static_cast<double>(src[ridx]));
      }
    }
  }
  return out;
}

}  // namespace n2048
