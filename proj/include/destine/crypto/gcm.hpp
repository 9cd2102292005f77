#pragma once

#include <array>
#include <cstdint>
#include <cstring>

#include "destine/common.hpp"
#include "destine/crypto/aes.hpp"
#include "destine/crypto/random.hpp"
#include "destine/errors.hpp"

namespace destine::crypto {

struct SymmetricKey {
  std::array<std::uint8_t, 32> bytes{};
};

// One AES-GCM sealing: 96-bit IV, ciphertext of plaintext length, 128-bit tag.
struct AeadSealed {
  std::array<std::uint8_t, 12> iv{};
  Bytes ciphertext;
  std::array<std::uint8_t, 16> tag{};
};

namespace gcm_detail {

// GHASH over GF(2^128) with 4-bit tables (Shoup's method). The table is a
// per-key precomputation of u * H for every 4-bit u, folded with the
// reduction polynomial x^128 + x^7 + x^2 + x + 1.
class Ghash {
 public:
  explicit Ghash(const std::uint8_t h[16]) {
    std::uint64_t vh = load_be64(h);
    std::uint64_t vl = load_be64(h + 8);
    hh_[8] = vh;
    hl_[8] = vl;
    for (int i = 4; i > 0; i >>= 1) {
      std::uint32_t t = (vl & 1) ? 0xe1000000u : 0;
      vl = vh << 63 | vl >> 1;
      vh = vh >> 1 ^ (std::uint64_t{t} << 32);
      hh_[i] = vh;
      hl_[i] = vl;
    }
    for (int i = 2; i <= 8; i *= 2) {
      for (int j = 1; j < i; ++j) {
        hh_[i + j] = hh_[i] ^ hh_[j];
        hl_[i + j] = hl_[i] ^ hl_[j];
      }
    }
    hh_[0] = 0;
    hl_[0] = 0;
  }

  // Absorbs one 16-byte block: y = (y ^ block) * H.
  void absorb_block(const std::uint8_t block[16]) {
    std::uint8_t x[16];
    for (int i = 0; i < 8; ++i) {
      x[i] = static_cast<std::uint8_t>((yh_ >> (56 - 8 * i)) & 0xff) ^ block[i];
      x[i + 8] = static_cast<std::uint8_t>((yl_ >> (56 - 8 * i)) & 0xff) ^ block[i + 8];
    }
    multiply(x);
  }

  // Absorbs data zero-padded to a block boundary.
  void absorb_padded(ByteSpan data) {
    std::size_t off = 0;
    while (data.size() - off >= 16) {
      absorb_block(data.data() + off);
      off += 16;
    }
    if (off < data.size()) {
      std::uint8_t last[16] = {};
      std::memcpy(last, data.data() + off, data.size() - off);
      absorb_block(last);
    }
  }

  void finish(std::uint64_t aad_bytes, std::uint64_t ct_bytes, std::uint8_t out[16]) {
    std::uint8_t len_block[16];
    store_be64(aad_bytes * 8, len_block);
    store_be64(ct_bytes * 8, len_block + 8);
    absorb_block(len_block);
    store_be64(yh_, out);
    store_be64(yl_, out + 8);
  }

 private:
  void multiply(const std::uint8_t x[16]) {
    static constexpr std::uint64_t rem4[16] = {
        0x0000, 0x1c20, 0x3840, 0x2460, 0x7080, 0x6ca0, 0x48c0, 0x54e0,
        0xe100, 0xfd20, 0xd940, 0xc560, 0x9180, 0x8da0, 0xa9c0, 0xb5e0};
    std::uint8_t lo = x[15] & 0xf;
    std::uint64_t zh = hh_[lo];
    std::uint64_t zl = hl_[lo];
    for (int i = 15; i >= 0; --i) {
      lo = x[i] & 0xf;
      std::uint8_t hi = x[i] >> 4;
      if (i != 15) {
        std::uint8_t rem = zl & 0xf;
        zl = zh << 60 | zl >> 4;
        zh = zh >> 4;
        zh ^= rem4[rem] << 48;
        zh ^= hh_[lo];
        zl ^= hl_[lo];
      }
      std::uint8_t rem = zl & 0xf;
      zl = zh << 60 | zl >> 4;
      zh = zh >> 4;
      zh ^= rem4[rem] << 48;
      zh ^= hh_[hi];
      zl ^= hl_[hi];
    }
    yh_ = zh;
    yl_ = zl;
  }

  std::uint64_t hh_[16] = {};
  std::uint64_t hl_[16] = {};
  std::uint64_t yh_ = 0;
  std::uint64_t yl_ = 0;
};

inline void inc32(std::uint8_t counter[16]) {
  for (int i = 15; i >= 12; --i) {
    if (++counter[i] != 0) break;
  }
}

// CTR keystream application starting from inc32(J0).
inline void ctr_xor(const Aes256& aes, const std::uint8_t j0[16], ByteSpan in,
                    std::uint8_t* out) {
  std::uint8_t counter[16];
  std::memcpy(counter, j0, 16);
  std::uint8_t keystream[16];
  std::size_t off = 0;
  while (off < in.size()) {
    inc32(counter);
    aes.encrypt_block(counter, keystream);
    std::size_t chunk = std::min<std::size_t>(16, in.size() - off);
    for (std::size_t i = 0; i < chunk; ++i) out[off + i] = in[off + i] ^ keystream[i];
    off += chunk;
  }
}

inline void compute_tag(const Aes256& aes, const std::uint8_t j0[16], ByteSpan aad,
                        ByteSpan ciphertext, std::uint8_t tag[16]) {
  std::uint8_t h[16];
  std::uint8_t zero[16] = {};
  aes.encrypt_block(zero, h);
  Ghash ghash(h);
  ghash.absorb_padded(aad);
  ghash.absorb_padded(ciphertext);
  std::uint8_t s[16];
  ghash.finish(aad.size(), ciphertext.size(), s);
  std::uint8_t ekj0[16];
  aes.encrypt_block(j0, ekj0);
  for (int i = 0; i < 16; ++i) tag[i] = ekj0[i] ^ s[i];
}

inline bool tag_equal(const std::uint8_t a[16], const std::uint8_t b[16]) {
  std::uint8_t diff = 0;
  for (int i = 0; i < 16; ++i) diff |= a[i] ^ b[i];
  return diff == 0;
}

}  // namespace gcm_detail

// Deterministic-IV variant used by the known-answer tests. Production call
// sites must use aead_encrypt, which draws a fresh IV.
inline AeadSealed aead_encrypt_with_iv(const SymmetricKey& key,
                                       const std::array<std::uint8_t, 12>& iv,
                                       ByteSpan plaintext, ByteSpan aad) {
  Aes256 aes(key.bytes);
  std::uint8_t j0[16] = {};
  std::memcpy(j0, iv.data(), 12);
  j0[15] = 1;

  AeadSealed sealed;
  sealed.iv = iv;
  sealed.ciphertext.resize(plaintext.size());
  gcm_detail::ctr_xor(aes, j0, plaintext, sealed.ciphertext.data());
  gcm_detail::compute_tag(aes, j0, aad, sealed.ciphertext, sealed.tag.data());
  return sealed;
}

inline AeadSealed aead_encrypt(const SymmetricKey& key, ByteSpan plaintext, ByteSpan aad) {
  return aead_encrypt_with_iv(key, random_array<12>(), plaintext, aad);
}

// Authenticates first; plaintext is released only after the recomputed tag
// matches (constant-time comparison).
inline Bytes aead_decrypt(const SymmetricKey& key, const AeadSealed& sealed, ByteSpan aad) {
  Aes256 aes(key.bytes);
  std::uint8_t j0[16] = {};
  std::memcpy(j0, sealed.iv.data(), 12);
  j0[15] = 1;

  std::uint8_t expected[16];
  gcm_detail::compute_tag(aes, j0, aad, sealed.ciphertext, expected);
  if (!gcm_detail::tag_equal(expected, sealed.tag.data()))
    throw AuthenticationError("AEAD authentication failed");

  Bytes plaintext(sealed.ciphertext.size());
  gcm_detail::ctr_xor(aes, j0, sealed.ciphertext, plaintext.data());
  return plaintext;
}

}  // namespace destine::crypto
