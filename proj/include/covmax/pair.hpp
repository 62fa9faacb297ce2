#pragma once

#include <compare>
#include <cstddef>

namespace covmax {

/// Zero-based column pair (i, j) with i <= j.
struct Pair {
  std::size_t i = 0;
  std::size_t j = 0;

  friend constexpr auto operator<=>(const Pair&, const Pair&) = default;
};

}  // namespace covmax
