#pragma once

#include <cstddef>
#include <stdexcept>
#include <type_traits>

namespace xor3 {

/// Invokes f with the limb count that fits `width` as an integral constant.
/// Widths up to 64 bits run on a single native machine word per key.
template <class F>
decltype(auto) dispatch_width(unsigned width, F&& f) {
  if (width >= 1 && width <= 64)
    return f(std::integral_constant<std::size_t, 1>{});
  if (width <= 128) return f(std::integral_constant<std::size_t, 2>{});
  if (width <= 256) return f(std::integral_constant<std::size_t, 4>{});
  if (width <= 512) return f(std::integral_constant<std::size_t, 8>{});
  throw std::invalid_argument("key width out of range (1..512)");
}

}  // namespace xor3
