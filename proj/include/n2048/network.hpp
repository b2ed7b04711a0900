#pragma once

// N-tuple network: symmetric sampling over shared per-stage lookup tables.

#include <array>
#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "n2048/architecture.hpp"
#include "n2048/board.hpp"

namespace n2048 {

inline constexpr int kMaxStageBits = 5;

// Workers read and write tables without locks; every access goes through
// a relaxed atomic so a read returns some previously written value.
inline float relaxed_load(const float& w) {
  return std::atomic_ref<float>(const_cast<float&>(w)).load(std::memory_order_relaxed);
}
inline void relaxed_store(float& w, float value) {
  std::atomic_ref<float>(w).store(value, std::memory_order_relaxed);
}

// Stage from the presence of exponents 16-g .. 15.
inline int stage_of(Board board, int stage_bits) {
  if (stage_bits == 0) return 0;
  const unsigned mask = board.exponent_mask();
  return static_cast<int>((mask >> (16 - stage_bits)) & ((1U << stage_bits) - 1));
}

// index = sum_j board[loc_j] * 16^(j-1)
std::uint64_t tuple_index(Board board, const TupleShape& shape);

struct WeightRef {
  std::uint32_t tuple = 0;
  std::uint32_t stage = 0;
  std::uint64_t index = 0;
  bool operator==(const WeightRef&) const = default;
};

// Offsets into one tuple's table (stage * 16^n + index) for the 8 views.
using ViewOffsets = std::array<std::uint64_t, 8>;

// Sum of 8 values independent of their order.
double order_free_sum(std::array<float, 8> v);

class NTupleNetwork {
 public:
  // Zero-initialized tables. Throws std::invalid_argument for g outside
  // [0, kMaxStageBits].
  NTupleNetwork(Architecture arch, int stage_bits);

  const Architecture& architecture() const { return arch_; }
  int stage_bits() const { return stage_bits_; }
  int stage_count() const { return 1 << stage_bits_; }
  std::size_t tuple_count() const { return arch_.tuples.size(); }
  int view_count() const { return static_cast<int>(8 * tuple_count()); }
  std::uint64_t stage_table_size(std::size_t tuple) const { return stage_size_[tuple]; }
  std::uint64_t parameter_count() const { return arch_.parameter_count(stage_bits_); }

  // All stages of one tuple, stage-major.
  std::span<float> table(std::size_t tuple) { return tables_[tuple]; }
  std::span<const float> table(std::size_t tuple) const { return tables_[tuple]; }
  std::span<float> table(std::size_t tuple, int stage);
  std::span<const float> table(std::size_t tuple, int stage) const;

  float weight(const WeightRef& ref) const { return tables_[ref.tuple][offset(ref)]; }
  float& weight(const WeightRef& ref) { return tables_[ref.tuple][offset(ref)]; }
  std::uint64_t offset(const WeightRef& ref) const { return ref.stage * stage_size_[ref.tuple] + ref.index; }

  double evaluate(Board board) const;

  // The 8m slots evaluate() reads, with multiplicity, tuple-major.
  std::vector<WeightRef> weight_refs(Board board) const;

  // Calls f(tuple, ViewOffsets) for every tuple, using the board's stage.
  template <class F>
  void for_each_tuple(Board board, F&& f) const {
    for_each_tuple(board, stage_of(board, stage_bits_), static_cast<F&&>(f));
  }

  template <class F>
  void for_each_tuple(Board board, int stage, F&& f) const {
    const std::uint64_t bits = board.bits();
    for (std::size_t i = 0; i < expanded_.size(); ++i) {
      const std::uint64_t base = static_cast<std::uint64_t>(stage) * stage_size_[i];
      ViewOffsets off;
      for (int v = 0; v < 8; ++v) off[v] = base + view_index(bits, expanded_[i][v]);
      f(i, off);
    }
  }

  bool operator==(const NTupleNetwork& other) const;

 private:
  struct Locations {
    std::array<std::uint8_t, 8> shift{};
    std::uint8_t n = 0;
  };

  static std::uint64_t view_index(std::uint64_t bits, const Locations& loc) {
    std::uint64_t idx = 0;
    for (int j = 0; j < loc.n; ++j) idx |= ((bits >> loc.shift[j]) & 0xF) << (4 * j);
    return idx;
  }

  Architecture arch_;
  int stage_bits_;
  std::vector<std::uint64_t> stage_size_;
  std::vector<std::array<Locations, 8>> expanded_;
  std::vector<std::vector<float>> tables_;
};

// Folds every redundant tuple table into its containing retained tuple.
// Throws std::invalid_argument if a redundant tuple has no container.
NTupleNetwork fold_redundant(const NTupleNetwork& network);

}  // namespace n2048
