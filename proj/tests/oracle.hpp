#pragma once

// Slow, obviously-correct reference implementations used by the tests and
// the benchmark. Nothing here shares code with the library's fast paths.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "n2048/board.hpp"
#include "n2048/network.hpp"

namespace oracle {

using Grid = std::array<std::array<int, 4>, 4>;  // [row][col] exponents

inline Grid to_grid(n2048::Board b) {
  Grid g{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g[r][c] = static_cast<int>((b.bits() >> (4 * (4 * r + c))) & 0xF);
  return g;
}

inline n2048::Board from_grid(const Grid& g) {
  std::uint64_t bits = 0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) bits |= static_cast<std::uint64_t>(g[r][c]) << (4 * (4 * r + c));
  return n2048::Board(bits);
}

// Slides a line towards index 0, each tile merging at most once.
inline std::uint32_t slide_line(std::array<int, 4>& line) {
  std::vector<int> tiles;
  for (int v : line)
    if (v != 0) tiles.push_back(v);
  std::array<int, 4> out{};
  std::uint32_t reward = 0;
  int k = 0;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (i + 1 < tiles.size() && tiles[i] == tiles[i + 1]) {
      const int merged = tiles[i] + 1;
      reward += 1U << merged;
      out[k++] = merged > 15 ? 15 : merged;
      ++i;
    } else {
      out[k++] = tiles[i];
    }
  }
  line = out;
  return reward;
}

struct Outcome {
  n2048::Board after;
  std::uint32_t reward = 0;
  bool legal = false;
};

inline Outcome slide(n2048::Board b, n2048::Move m) {
  Grid g = to_grid(b);
  std::uint32_t reward = 0;
  for (int k = 0; k < 4; ++k) {
    std::array<int, 4> line{};
    for (int j = 0; j < 4; ++j) {
      switch (m) {
        case n2048::Move::Left: line[j] = g[k][j]; break;
        case n2048::Move::Right: line[j] = g[k][3 - j]; break;
        case n2048::Move::Up: line[j] = g[j][k]; break;
        case n2048::Move::Down: line[j] = g[3 - j][k]; break;
      }
    }
    reward += slide_line(line);
    for (int j = 0; j < 4; ++j) {
      switch (m) {
        case n2048::Move::Left: g[k][j] = line[j]; break;
        case n2048::Move::Right: g[k][3 - j] = line[j]; break;
        case n2048::Move::Up: g[j][k] = line[j]; break;
        case n2048::Move::Down: g[3 - j][k] = line[j]; break;
      }
    }
  }
  const auto after = from_grid(g);
  return {after, reward, after != b};
}

// Plain recursive expectimax, no caching. Mirrors the player's contract:
// depth 0 or a full board is the network value; a spawn after which no
// move is legal contributes 0.
inline double expectimax(const n2048::NTupleNetwork& net, n2048::Board after, int depth) {
  const Grid g = to_grid(after);
  int empties = 0;
  for (const auto& row : g)
    for (int v : row) empties += v == 0 ? 1 : 0;
  if (depth == 0 || empties == 0) return net.evaluate(after);
  double total = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (g[r][c] != 0) continue;
      for (auto [e, p] : {std::pair{1, 0.9}, std::pair{2, 0.1}}) {
        Grid child = g;
        child[r][c] = e;
        double best = 0;
        bool any = false;
        for (auto m : {n2048::Move::Up, n2048::Move::Right, n2048::Move::Down, n2048::Move::Left}) {
          const auto o = oracle::slide(from_grid(child), m);
          if (!o.legal) continue;
          const double v = o.reward + expectimax(net, o.after, depth - 1);
          if (!any || v > best) best = v;
          any = true;
        }
        total += p / empties * best;
      }
    }
  }
  return total;
}

// Autostep over a dense feature vector, written straight from the
// published algorithm; tau here is the multiplier on the normaliser update.
struct DenseAutostep {
  std::vector<double> w, alpha, h, v;
  double mu, tau;

  DenseAutostep(std::size_t n, double alpha_init, double mu_, double tau_)
      : w(n, 0.0), alpha(n, alpha_init), h(n, 0.0), v(n, 0.0), mu(mu_), tau(tau_) {}

  void step(const std::vector<double>& x, double delta) {
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      const double dxh = delta * x[i] * h[i];
      v[i] = std::max(std::abs(dxh), v[i] + tau * alpha[i] * x[i] * x[i] * (std::abs(dxh) - v[i]));
      if (v[i] != 0) alpha[i] = alpha[i] * std::exp(mu * dxh / v[i]);
    }
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) m += alpha[i] * x[i] * x[i];
    m = std::max(m, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      alpha[i] /= m;
      w[i] += alpha[i] * delta * x[i];
      h[i] = h[i] * (1 - alpha[i] * x[i] * x[i]) + alpha[i] * delta * x[i];
    }
  }
};

}  // namespace oracle
