#pragma once

// 2048 game mechanics on a packed 64-bit board.
//
// Cell i (row-major, 0..15) lives in nibble i, so row r occupies bits
// [16r, 16r + 16) with column 0 in the lowest nibble. A nibble holds the
// tile exponent: 0 is an empty square, e >= 1 is a tile of value 2^e.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace n2048 {

using Rng = std::mt19937_64;

enum class Move : std::uint8_t { Up = 0, Right = 1, Down = 2, Left = 3 };

// Fixed direction order; also the greedy tie-break order.
inline constexpr std::array<Move, 4> kMoves = {Move::Up, Move::Right, Move::Down, Move::Left};

inline constexpr int kMaxExponent = 15;

std::string_view to_string(Move m);

class Board {
 public:
  constexpr Board() = default;
  constexpr explicit Board(std::uint64_t bits) : bits_(bits) {}

  // Exponents in row-major order. Throws std::invalid_argument if any is
  // outside [0, 15].
  static Board from_exponents(const std::array<int, 16>& cells);

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int cell(int i) const { return static_cast<int>((bits_ >> (4 * i)) & 0xF); }
  constexpr Board with_cell(int i, int exponent) const {
    const std::uint64_t mask = std::uint64_t{0xF} << (4 * i);
    return Board((bits_ & ~mask) | (static_cast<std::uint64_t>(exponent) << (4 * i)));
  }
  constexpr std::uint16_t row(int r) const { return static_cast<std::uint16_t>(bits_ >> (16 * r)); }

  int empty_count() const;
  int max_exponent() const;
  // Bit e set iff some cell holds exponent e (bit 0 iff some cell is empty).
  std::uint16_t exponent_mask() const;
  std::array<int, 16> exponents() const;

  constexpr bool operator==(const Board&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

struct MoveOutcome {
  Board afterstate;
  std::uint32_t reward = 0;
  bool legal = false;
};

class MoveSet {
 public:
  constexpr MoveSet() = default;
  constexpr explicit MoveSet(std::uint8_t mask) : mask_(mask) {}
  constexpr bool contains(Move m) const { return (mask_ >> static_cast<int>(m)) & 1U; }
  constexpr void insert(Move m) { mask_ |= static_cast<std::uint8_t>(1U << static_cast<int>(m)); }
  constexpr bool empty() const { return mask_ == 0; }
  int size() const;
  constexpr std::uint8_t mask() const { return mask_; }
  constexpr bool operator==(const MoveSet&) const = default;

 private:
  std::uint8_t mask_ = 0;
};

// Table-driven slide. Illegal moves return legal=false with the input board.
MoveOutcome slide(Board board, Move move);

// Places a 2-tile (p = 0.9) or a 4-tile (p = 0.1) on a uniformly chosen
// empty cell. Throws std::logic_error when the board is full.
Board spawn_random_tile(Board board, Rng& rng);

Board initial_state(Rng& rng);

bool is_terminal(Board board);
MoveSet legal_moves(Board board);

Board transpose(Board board);

// Text form: 4 lines of 4 whitespace-separated tile values, 0 for empty.
std::string to_text(Board board);
// Throws std::invalid_argument on malformed input or non-power-of-two tiles.
Board board_from_text(std::string_view text);

}  // namespace n2048
