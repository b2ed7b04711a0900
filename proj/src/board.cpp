#include "n2048/board.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace n2048 {

namespace {

std::uint16_t reverse_row(std::uint16_t row) {
  return static_cast<std::uint16_t>(((row & 0x000F) << 12) | ((row & 0x00F0) << 4) |
                                    ((row & 0x0F00) >> 4) | ((row & 0xF000) >> 12));
}

struct RowTables {
  std::array<std::uint16_t, 65536> left{};
  std::array<std::uint16_t, 65536> right{};
  std::array<std::uint32_t, 65536> reward{};

  RowTables() {
    for (std::uint32_t r = 0; r < 65536; ++r) {
      std::array<int, 4> line{};
      int n = 0;
      for (int c = 0; c < 4; ++c) {
        const int e = static_cast<int>((r >> (4 * c)) & 0xF);
        if (e != 0) line[n++] = e;
      }
      std::array<int, 4> out{};
      int k = 0;
      std::uint32_t gained = 0;
      for (int i = 0; i < n; ++i) {
        if (i + 1 < n && line[i] == line[i + 1]) {
          gained += 1U << (line[i] + 1);
          out[k++] = line[i] + 1 > kMaxExponent ? kMaxExponent : line[i] + 1;
          ++i;
        } else {
          out[k++] = line[i];
        }
      }
      std::uint16_t packed = 0;
      for (int c = 0; c < 4; ++c) packed |= static_cast<std::uint16_t>(out[c] << (4 * c));
      left[r] = packed;
      reward[r] = gained;
    }
    for (std::uint32_t r = 0; r < 65536; ++r) {
      const auto rev = reverse_row(static_cast<std::uint16_t>(r));
      right[r] = reverse_row(left[rev]);
    }
  }
};

const RowTables& tables() {
  static const RowTables t;
  return t;
}

// Applies a per-row table to all four rows.
MoveOutcome slide_rows(std::uint64_t bits, const std::array<std::uint16_t, 65536>& table,
                       bool reversed) {
  const auto& t = tables();
  std::uint64_t out = 0;
  std::uint32_t reward = 0;
  for (int r = 0; r < 4; ++r) {
    const auto row = static_cast<std::uint16_t>(bits >> (16 * r));
    out |= static_cast<std::uint64_t>(table[row]) << (16 * r);
    reward += t.reward[reversed ? reverse_row(row) : row];
  }
  return {Board(out), reward, out != bits};
}

}  // namespace

std::string_view to_string(Move m) {
  switch (m) {
    case Move::Up: return "UP";
    case Move::Right: return "RIGHT";
    case Move::Down: return "DOWN";
    case Move::Left: return "LEFT";
  }
  return "?";
}

Board Board::from_exponents(const std::array<int, 16>& cells) {
  Board b;
  for (int i = 0; i < 16; ++i) {
    if (cells[i] < 0 || cells[i] > kMaxExponent) throw std::invalid_argument("tile exponent out of range");
    b = b.with_cell(i, cells[i]);
  }
  return b;
}

int Board::empty_count() const {
  // Fold each nibble to one bit that is set iff the nibble is non-zero.
  std::uint64_t x = bits_;
  x |= x >> 2;
  x |= x >> 1;
  x &= 0x1111111111111111ULL;
  return 16 - std::popcount(x);
}

int Board::max_exponent() const {
  int m = 0;
  for (int i = 0; i < 16; ++i) m = cell(i) > m ? cell(i) : m;
  return m;
}

std::uint16_t Board::exponent_mask() const {
  std::uint16_t mask = 0;
  for (int i = 0; i < 16; ++i) mask |= static_cast<std::uint16_t>(1U << cell(i));
  return mask;
}

std::array<int, 16> Board::exponents() const {
  std::array<int, 16> out{};
  for (int i = 0; i < 16; ++i) out[i] = cell(i);
  return out;
}

int MoveSet::size() const { return std::popcount(static_cast<unsigned>(mask_)); }

Board transpose(Board board) {
  const std::uint64_t x = board.bits();
  const std::uint64_t a1 = x & 0xF0F00F0FF0F00F0FULL;
  const std::uint64_t a2 = x & 0x0000F0F00000F0F0ULL;
  const std::uint64_t a3 = x & 0x0F0F00000F0F0000ULL;
  const std::uint64_t a = a1 | (a2 << 12) | (a3 >> 12);
  const std::uint64_t b1 = a & 0xFF00FF0000FF00FFULL;
  const std::uint64_t b2 = a & 0x00FF00FF00000000ULL;
  const std::uint64_t b3 = a & 0x00000000FF00FF00ULL;
  return Board(b1 | (b2 >> 24) | (b3 << 24));
}

MoveOutcome slide(Board board, Move move) {
  const auto& t = tables();
  switch (move) {
    case Move::Left: return slide_rows(board.bits(), t.left, false);
    case Move::Right: return slide_rows(board.bits(), t.right, true);
    case Move::Up: {
      auto out = slide_rows(transpose(board).bits(), t.left, false);
      out.afterstate = transpose(out.afterstate);
      return out;
    }
    case Move::Down: {
      auto out = slide_rows(transpose(board).bits(), t.right, true);
      out.afterstate = transpose(out.afterstate);
      return out;
    }
  }
  return {board, 0, false};
}

Board spawn_random_tile(Board board, Rng& rng) {
  const int empties = board.empty_count();
  if (empties == 0) throw std::logic_error("spawn_random_tile: board is full");
  int pick = std::uniform_int_distribution<int>(0, empties - 1)(rng);
  const int exponent = std::uniform_int_distribution<int>(0, 9)(rng) == 0 ? 2 : 1;
  for (int i = 0; i < 16; ++i) {
    if (board.cell(i) != 0) continue;
    if (pick-- == 0) return board.with_cell(i, exponent);
  }
  return board;  // unreachable
}

Board initial_state(Rng& rng) {
  Board b;
  b = spawn_random_tile(b, rng);
  return spawn_random_tile(b, rng);
}

MoveSet legal_moves(Board board) {
  MoveSet set;
  for (Move m : kMoves) {
    if (slide(board, m).legal) set.insert(m);
  }
  return set;
}

bool is_terminal(Board board) {
  if (board.empty_count() > 0) return false;
  return legal_moves(board).empty();
}

std::string to_text(Board board) {
  std::ostringstream os;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const int e = board.cell(4 * r + c);
      if (c) os << ' ';
      os << (e == 0 ? 0U : 1U << e);
    }
    os << '\n';
  }
  return os.str();
}

Board board_from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::array<int, 16> cells{};
  for (int i = 0; i < 16; ++i) {
    long long v = 0;
    if (!(is >> v)) throw std::invalid_argument("board text: expected 16 tile values");
    if (v == 0) {
      cells[i] = 0;
      continue;
    }
    if (v < 2 || (v & (v - 1)) != 0) throw std::invalid_argument("board text: tile is not a power of two");
    const int e = std::countr_zero(static_cast<unsigned long long>(v));
    if (e > kMaxExponent) throw std::invalid_argument("board text: tile exceeds 32768");
    cells[i] = e;
  }
  std::string rest;
  if (is >> rest) throw std::invalid_argument("board text: trailing data");
  return Board::from_exponents(cells);
}

}  // namespace n2048
