#pragma once

// Episode-start scheduling over stages. Stage pointers are 1-based
// (pointer 1 = fresh game); initial-state sets are indexed by the 0-based
// network stage, so pointer p draws from set p - 1.

#include <cstddef>
#include <mutex>
#include <optional>
#include <vector>

#include "n2048/board.hpp"

namespace n2048 {

inline constexpr std::size_t kCarouselCapacity = 1000;

// Bounded per-stage sets of recently visited stage-initial afterstates.
// Safe for concurrent record/draw.
class CarouselState {
 public:
  explicit CarouselState(int stage_bits, std::size_t capacity = kCarouselCapacity);
  CarouselState(const CarouselState& other);
  CarouselState& operator=(const CarouselState& other);

  int stage_bits() const { return stage_bits_; }
  std::size_t capacity() const { return capacity_; }

  // Appends, evicting the oldest entry once the stage's set is full.
  void record(int stage, Board afterstate);
  // Uniform draw from the stage's set; nullopt when empty.
  std::optional<Board> draw(int stage, Rng& rng) const;
  std::size_t size(int stage) const;
  // Oldest first.
  std::vector<Board> members(int stage) const;
  void restore(int stage, const std::vector<Board>& members);

 private:
  struct Ring {
    std::vector<Board> items;
    std::size_t next = 0;  // overwrite position once full
  };

  int stage_bits_;
  std::size_t capacity_;
  std::vector<Ring> rings_;
  mutable std::mutex mutex_;
};

// A worker's position in the carousel.
class CarouselCursor {
 public:
  explicit CarouselCursor(int pointer = 1) : pointer_(pointer) {}
  int pointer() const { return pointer_; }

  // Pointer 1: a fresh initial state. Otherwise a random member of the
  // current stage's set with one random tile added (falls back to a fresh
  // start if the set has emptied).
  Board next_start(const CarouselState& carousel, Rng& rng) const;
  // After an episode: step to the next stage, wrapping to 1 past the last
  // stage or at an empty set.
  void advance(const CarouselState& carousel);

 private:
  int pointer_;
};

}  // namespace n2048
