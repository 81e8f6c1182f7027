#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace martinq {

/// A state of a countable chain, stored as a short integer vector.
///
/// Z and the bang-bang walk use one coordinate, Z^2 uses two, and the k-ary
/// tree stores its word (the root is the empty vector). The defaulted
/// lexicographic order is the canonical iteration order.
struct State {
  std::vector<std::int32_t> coords;

  State() = default;
  State(std::initializer_list<std::int32_t> init) : coords(init) {}
  explicit State(std::vector<std::int32_t> c) : coords(std::move(c)) {}

  std::size_t size() const { return coords.size(); }
  std::int32_t operator[](std::size_t i) const { return coords[i]; }
  std::int32_t& operator[](std::size_t i) { return coords[i]; }

  friend auto operator<=>(const State&, const State&) = default;
  friend bool operator==(const State&, const State&) = default;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL ^ s.coords.size();
    for (auto c : s.coords) {
      h ^= static_cast<std::uint32_t>(c);
      h *= 0x100000001B3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace martinq
