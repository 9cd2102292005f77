#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include <sys/random.h>

#include "destine/errors.hpp"

namespace destine::crypto {

// Fills `out` from the OS entropy source. Failure is fatal by contract:
// nothing downstream may run with weak nonces or keys.
inline void secure_random(std::span<std::uint8_t> out) {
  std::size_t off = 0;
  while (off < out.size()) {
    std::size_t chunk = std::min<std::size_t>(out.size() - off, 256);
    if (::getentropy(out.data() + off, chunk) != 0)
      throw CryptoError("OS randomness source failed");
    off += chunk;
  }
}

template <std::size_t N>
std::array<std::uint8_t, N> random_array() {
  std::array<std::uint8_t, N> a{};
  secure_random(a);
  return a;
}

}  // namespace destine::crypto
