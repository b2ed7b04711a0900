#include "n2048/carousel.hpp"

#include <stdexcept>

namespace n2048 {

CarouselState::CarouselState(int stage_bits, std::size_t capacity)
    : stage_bits_(stage_bits), capacity_(capacity), rings_(std::size_t{1} << stage_bits) {
  if (capacity == 0) throw std::invalid_argument("carousel capacity must be positive");
}

CarouselState::CarouselState(const CarouselState& other) : stage_bits_(other.stage_bits_), capacity_(other.capacity_) {
  std::lock_guard lock(other.mutex_);
  rings_ = other.rings_;
}

CarouselState& CarouselState::operator=(const CarouselState& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  stage_bits_ = other.stage_bits_;
  capacity_ = other.capacity_;
  rings_ = other.rings_;
  return *this;
}

void CarouselState::record(int stage, Board afterstate) {
  std::lock_guard lock(mutex_);
  auto& ring = rings_.at(static_cast<std::size_t>(stage));
  if (ring.items.size() < capacity_) {
    ring.items.push_back(afterstate);
  } else {
    ring.items[ring.next] = afterstate;
    ring.next = (ring.next + 1) % capacity_;
  }
}

std::optional<Board> CarouselState::draw(int stage, Rng& rng) const {
  std::lock_guard lock(mutex_);
  const auto& ring = rings_.at(static_cast<std::size_t>(stage));
  if (ring.items.empty()) return std::nullopt;
  const auto i = std::uniform_int_distribution<std::size_t>(0, ring.items.size() - 1)(rng);
  return ring.items[i];
}

std::size_t CarouselState::size(int stage) const {
  std::lock_guard lock(mutex_);
  return rings_.at(static_cast<std::size_t>(stage)).items.size();
}

std::vector<Board> CarouselState::members(int stage) const {
  std::lock_guard lock(mutex_);
  const auto& ring = rings_.at(static_cast<std::size_t>(stage));
  std::vector<Board> out;
  out.reserve(ring.items.size());
  for (std::size_t k = 0; k < ring.items.size(); ++k) out.push_back(ring.items[(ring.next + k) % ring.items.size()]);
  return out;
}

void CarouselState::restore(int stage, const std::vector<Board>& members) {
  if (members.size() > capacity_) throw std::invalid_argument("carousel restore: too many members");
  std::lock_guard lock(mutex_);
  auto& ring = rings_.at(static_cast<std::size_t>(stage));
  ring.items = members;
  ring.next = 0;
}

Board CarouselCursor::next_start(const CarouselState& carousel, Rng& rng) const {
  if (pointer_ > 1) {
    if (auto s = carousel.draw(pointer_ - 1, rng)) {
      if (s->empty_count() > 0) return spawn_random_tile(*s, rng);
    }
  }
  return initial_state(rng);
}

void CarouselCursor::advance(const CarouselState& carousel) {
  ++pointer_;
  const int stages = 1 << carousel.stage_bits();
  if (pointer_ > stages || carousel.size(pointer_ - 1) == 0) pointer_ = 1;
}

}  // namespace n2048
