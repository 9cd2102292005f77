#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace destine::crypto {

namespace aes_detail {

inline std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>(x << 1 ^ ((x >> 7) * 0x1b));
}

struct Tables {
  std::array<std::uint8_t, 256> sbox{};
  std::array<std::uint32_t, 256> te0{}, te1{}, te2{}, te3{};

  Tables() {
    // S-box from the GF(2^8) inverse followed by the affine map.
    std::uint8_t pow3[256], log3[256] = {};
    std::uint8_t p = 1;
    for (int i = 0; i < 256; ++i) {
      pow3[i] = p;
      log3[p] = static_cast<std::uint8_t>(i);
      p = static_cast<std::uint8_t>(p ^ xtime(p));  // p *= 3
    }
    auto rotl8 = [](std::uint8_t x, int n) {
      return static_cast<std::uint8_t>(x << n | x >> (8 - n));
    };
    for (int i = 0; i < 256; ++i) {
      std::uint8_t inv = i ? pow3[255 - log3[i]] : 0;
      sbox[i] = static_cast<std::uint8_t>(inv ^ rotl8(inv, 1) ^ rotl8(inv, 2) ^
                                          rotl8(inv, 3) ^ rotl8(inv, 4) ^ 0x63);
    }
    for (int i = 0; i < 256; ++i) {
      std::uint8_t s = sbox[i];
      std::uint8_t s2 = xtime(s);
      std::uint8_t s3 = static_cast<std::uint8_t>(s2 ^ s);
      std::uint32_t w = std::uint32_t{s2} << 24 | std::uint32_t{s} << 16 |
                        std::uint32_t{s} << 8 | s3;
      te0[i] = w;
      te1[i] = w >> 8 | w << 24;
      te2[i] = w >> 16 | w << 16;
      te3[i] = w >> 24 | w << 8;
    }
  }
};

inline const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace aes_detail

// AES-256, encryption direction only (all GCM needs).
class Aes256 {
 public:
  explicit Aes256(std::span<const std::uint8_t, 32> key) {
    const auto& t = aes_detail::tables();
    auto sub_word = [&](std::uint32_t w) {
      return std::uint32_t{t.sbox[w >> 24]} << 24 | std::uint32_t{t.sbox[w >> 16 & 0xff]} << 16 |
             std::uint32_t{t.sbox[w >> 8 & 0xff]} << 8 | t.sbox[w & 0xff];
    };
    for (int i = 0; i < 8; ++i)
      rk_[i] = std::uint32_t{key[4 * i]} << 24 | std::uint32_t{key[4 * i + 1]} << 16 |
               std::uint32_t{key[4 * i + 2]} << 8 | key[4 * i + 3];
    std::uint8_t rcon = 1;
    for (int i = 8; i < 60; ++i) {
      std::uint32_t temp = rk_[i - 1];
      if (i % 8 == 0) {
        temp = sub_word(temp << 8 | temp >> 24) ^ (std::uint32_t{rcon} << 24);
        rcon = aes_detail::xtime(rcon);
      } else if (i % 8 == 4) {
        temp = sub_word(temp);
      }
      rk_[i] = rk_[i - 8] ^ temp;
    }
  }

  void encrypt_block(const std::uint8_t in[16], std::uint8_t out[16]) const {
    const auto& t = aes_detail::tables();
    auto load = [](const std::uint8_t* p) {
      return std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 |
             p[3];
    };
    std::uint32_t s0 = load(in) ^ rk_[0];
    std::uint32_t s1 = load(in + 4) ^ rk_[1];
    std::uint32_t s2 = load(in + 8) ^ rk_[2];
    std::uint32_t s3 = load(in + 12) ^ rk_[3];
    for (int round = 1; round < 14; ++round) {
      const std::uint32_t* k = &rk_[4 * round];
      std::uint32_t t0 = t.te0[s0 >> 24] ^ t.te1[s1 >> 16 & 0xff] ^ t.te2[s2 >> 8 & 0xff] ^
                         t.te3[s3 & 0xff] ^ k[0];
      std::uint32_t t1 = t.te0[s1 >> 24] ^ t.te1[s2 >> 16 & 0xff] ^ t.te2[s3 >> 8 & 0xff] ^
                         t.te3[s0 & 0xff] ^ k[1];
      std::uint32_t t2 = t.te0[s2 >> 24] ^ t.te1[s3 >> 16 & 0xff] ^ t.te2[s0 >> 8 & 0xff] ^
                         t.te3[s1 & 0xff] ^ k[2];
      std::uint32_t t3 = t.te0[s3 >> 24] ^ t.te1[s0 >> 16 & 0xff] ^ t.te2[s1 >> 8 & 0xff] ^
                         t.te3[s2 & 0xff] ^ k[3];
      s0 = t0; s1 = t1; s2 = t2; s3 = t3;
    }
    const std::uint32_t* k = &rk_[56];
    auto s = [&](std::uint32_t w, int shift) {
      return std::uint32_t{t.sbox[w >> shift & 0xff]};
    };
    std::uint32_t o0 = (s(s0, 24) << 24 | s(s1, 16) << 16 | s(s2, 8) << 8 | s(s3, 0)) ^ k[0];
    std::uint32_t o1 = (s(s1, 24) << 24 | s(s2, 16) << 16 | s(s3, 8) << 8 | s(s0, 0)) ^ k[1];
    std::uint32_t o2 = (s(s2, 24) << 24 | s(s3, 16) << 16 | s(s0, 8) << 8 | s(s1, 0)) ^ k[2];
    std::uint32_t o3 = (s(s3, 24) << 24 | s(s0, 16) << 16 | s(s1, 8) << 8 | s(s2, 0)) ^ k[3];
    auto store = [](std::uint32_t w, std::uint8_t* p) {
      p[0] = static_cast<std::uint8_t>(w >> 24);
      p[1] = static_cast<std::uint8_t>(w >> 16);
      p[2] = static_cast<std::uint8_t>(w >> 8);
      p[3] = static_cast<std::uint8_t>(w);
    };
    store(o0, out);
    store(o1, out + 4);
    store(o2, out + 8);
    store(o3, out + 12);
  }

 private:
  std::array<std::uint32_t, 60> rk_{};
};

}  // namespace destine::crypto
