#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>

#include "destine/common.hpp"

namespace destine::crypto {

// 256-bit unsigned integer as four little-endian 64-bit limbs, with the
// Montgomery machinery needed for prime-field arithmetic.
struct U256 {
  std::array<std::uint64_t, 4> w{};

  constexpr bool is_zero() const { return (w[0] | w[1] | w[2] | w[3]) == 0; }

  constexpr bool bit(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }

  friend constexpr bool operator==(const U256&, const U256&) = default;

  friend constexpr std::strong_ordering operator<=>(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i) {
      if (a.w[i] != b.w[i]) return a.w[i] <=> b.w[i];
    }
    return std::strong_ordering::equal;
  }

  static U256 from_be_bytes(std::span<const std::uint8_t, 32> b) {
    U256 r;
    for (int i = 0; i < 4; ++i) r.w[3 - i] = load_be64(b.data() + i * 8);
    return r;
  }

  std::array<std::uint8_t, 32> to_be_bytes() const {
    std::array<std::uint8_t, 32> b{};
    for (int i = 0; i < 4; ++i) store_be64(w[3 - i], b.data() + i * 8);
    return b;
  }

  static U256 from_hex(std::string_view hex) {
    Bytes raw = destine::from_hex(hex);
    if (raw.size() != 32) throw std::invalid_argument("expected 64 hex chars");
    return from_be_bytes(std::span<const std::uint8_t, 32>(raw.data(), 32));
  }

  std::string to_hex() const {
    auto b = to_be_bytes();
    return destine::to_hex(b);
  }
};

// a + b, returns carry out.
inline std::uint64_t add_carry(const U256& a, const U256& b, U256& out) {
  unsigned __int128 acc = 0;
  for (int i = 0; i < 4; ++i) {
    acc += static_cast<unsigned __int128>(a.w[i]) + b.w[i];
    out.w[i] = static_cast<std::uint64_t>(acc);
    acc >>= 64;
  }
  return static_cast<std::uint64_t>(acc);
}

// a - b, returns borrow out (1 if a < b).
inline std::uint64_t sub_borrow(const U256& a, const U256& b, U256& out) {
  unsigned __int128 borrow = 0;
  for (int i = 0; i < 4; ++i) {
    unsigned __int128 d = static_cast<unsigned __int128>(a.w[i]) - b.w[i] - borrow;
    out.w[i] = static_cast<std::uint64_t>(d);
    borrow = (d >> 64) & 1;
  }
  return static_cast<std::uint64_t>(borrow);
}

// Montgomery context for an odd 256-bit modulus with the top bit set
// (true of both the P-256 field prime and group order).
class MontCtx {
 public:
  explicit MontCtx(const U256& modulus) : m_(modulus) {
    // -m^{-1} mod 2^64 by Newton iteration.
    std::uint64_t inv = m_.w[0];
    for (int i = 0; i < 6; ++i) inv *= 2 - m_.w[0] * inv;
    neg_inv_ = ~inv + 1;

    // R mod m where R = 2^256: since 2^255 < m < 2^256, R mod m = R - m.
    U256 zero{};
    sub_borrow(zero, m_, r_mod_m_);
    // R^2 mod m via 256 modular doublings of R.
    r2_ = r_mod_m_;
    for (int i = 0; i < 256; ++i) r2_ = add(r2_, r2_);
    one_mont_ = r_mod_m_;
  }

  const U256& modulus() const { return m_; }

  U256 add(const U256& a, const U256& b) const {
    U256 s;
    std::uint64_t carry = add_carry(a, b, s);
    U256 t;
    std::uint64_t borrow = sub_borrow(s, m_, t);
    return (carry || !borrow) ? t : s;
  }

  U256 sub(const U256& a, const U256& b) const {
    U256 d;
    if (sub_borrow(a, b, d)) {
      U256 fixed;
      add_carry(d, m_, fixed);
      return fixed;
    }
    return d;
  }

  // Montgomery product: a * b * R^{-1} mod m (CIOS).
  U256 mul(const U256& a, const U256& b) const {
    std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      unsigned __int128 carry = 0;
      for (int j = 0; j < 4; ++j) {
        carry += static_cast<unsigned __int128>(a.w[i]) * b.w[j] + t[j];
        t[j] = static_cast<std::uint64_t>(carry);
        carry >>= 64;
      }
      carry += t[4];
      t[4] = static_cast<std::uint64_t>(carry);
      t[5] = static_cast<std::uint64_t>(carry >> 64);

      std::uint64_t u = t[0] * neg_inv_;
      carry = static_cast<unsigned __int128>(u) * m_.w[0] + t[0];
      carry >>= 64;
      for (int j = 1; j < 4; ++j) {
        carry += static_cast<unsigned __int128>(u) * m_.w[j] + t[j];
        t[j - 1] = static_cast<std::uint64_t>(carry);
        carry >>= 64;
      }
      carry += t[4];
      t[3] = static_cast<std::uint64_t>(carry);
      t[4] = t[5] + static_cast<std::uint64_t>(carry >> 64);
    }
    U256 r{{t[0], t[1], t[2], t[3]}};
    if (t[4] || r >= m_) {
      U256 fixed;
      sub_borrow(r, m_, fixed);
      return fixed;
    }
    return r;
  }

  U256 to_mont(const U256& a) const { return mul(a, r2_); }

  U256 from_mont(const U256& a) const { return mul(a, U256{{1, 0, 0, 0}}); }

  U256 one_mont() const { return one_mont_; }

  // a^e mod m for a, result in Montgomery form.
  U256 pow(const U256& a, const U256& e) const {
    U256 result = one_mont_;
    for (int i = 255; i >= 0; --i) {
      result = mul(result, result);
      if (e.bit(i)) result = mul(result, a);
    }
    return result;
  }

  // Modular inverse via Fermat (modulus is prime in every use here);
  // operand and result in Montgomery form.
  U256 inverse(const U256& a) const {
    U256 e;
    U256 two{{2, 0, 0, 0}};
    sub_borrow(m_, two, e);
    return pow(a, e);
  }

 private:
  U256 m_;
  std::uint64_t neg_inv_ = 0;
  U256 r_mod_m_;
  U256 r2_;
  U256 one_mont_;
};

}  // namespace destine::crypto
