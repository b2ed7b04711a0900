#pragma once

// Tuple geometry, the board symmetry group, and the named architecture registry.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "n2048/board.hpp"

namespace n2048 {

// view_v(b)[c] = b[kSymmetryPerm[v][c]]. Views 0-3 are the rotations by
// 0/90/180/270 degrees clockwise, views 4-7 the same rotations of the
// horizontal mirror image.
extern const std::array<std::array<std::uint8_t, 16>, 8> kSymmetryPerm;

Board apply_view(Board board, int view);
// Inverse of apply_view for the same view index.
Board apply_inverse_view(Board board, int view);
std::array<Board, 8> symmetric_views(Board board);

struct TupleShape {
  std::string kind;                   // "3", "4", "22", "33", "42", "43", "421"
  std::vector<std::uint8_t> cells;    // ordered board locations, row-major
  bool redundant = false;
  std::optional<std::uint16_t> fold_parent;  // resolved for redundant tuples

  std::size_t length() const { return cells.size(); }
  bool operator==(const TupleShape&) const = default;
};

// 16^n
constexpr std::uint64_t table_size_for(std::size_t n) { return std::uint64_t{1} << (4 * n); }

struct Architecture {
  std::string name;
  std::vector<TupleShape> tuples;

  // Weights across all stages; metadata only, nothing is allocated.
  std::uint64_t parameter_count(int stage_bits) const;
  std::size_t retained_count() const;
  // Same tuples, locations and redundancy (names are ignored).
  bool same_geometry(const Architecture& other) const;
};

// Throws std::invalid_argument for an unknown name.
Architecture architecture(std::string_view name);
std::vector<std::string> architecture_names();
// Registry entry whose geometry equals `tuples`, if any.
std::optional<std::string> identify_architecture(const std::vector<TupleShape>& tuples);

// Validates cells and fills fold_parent for each redundant tuple with the
// first retained tuple that contains it under some symmetry. Throws
// std::invalid_argument on malformed tuples.
void resolve_fold_parents(std::vector<TupleShape>& tuples);

// Symmetry u with kSymmetryPerm[u][r] in `parent` for every cell r of
// `redundant`, together with the parent position of each mapped cell.
struct Containment {
  int view = 0;
  std::vector<std::uint8_t> positions;
};
std::optional<Containment> find_containment(const TupleShape& redundant, const TupleShape& parent);

}  // namespace n2048
