#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "destine/crypto/p256.hpp"
#include "destine/crypto/random.hpp"
#include "destine/crypto/sha256.hpp"
#include "destine/errors.hpp"

namespace destine::crypto {

enum class Role { admin, uploader };

inline const char* role_name(Role r) { return r == Role::admin ? "admin" : "uploader"; }

// Uncompressed SEC1 point: 0x04 || X || Y.
struct PublicKey {
  std::array<std::uint8_t, 65> bytes{};

  friend auto operator<=>(const PublicKey&, const PublicKey&) = default;

  std::string to_hex() const { return destine::to_hex(bytes); }

  static PublicKey from_hex(std::string_view hex) {
    Bytes raw = destine::from_hex(hex);
    if (raw.size() != 65) throw FormatError("public key must be 65 bytes (130 hex chars)");
    PublicKey pk;
    std::copy(raw.begin(), raw.end(), pk.bytes.begin());
    return pk;
  }
};

// Fixed-width big-endian r || s, 64 bytes.
struct Signature {
  std::array<std::uint8_t, 64> bytes{};

  friend auto operator<=>(const Signature&, const Signature&) = default;

  std::string to_hex() const { return destine::to_hex(bytes); }

  static Signature from_hex(std::string_view hex) {
    Bytes raw = destine::from_hex(hex);
    if (raw.size() != 64) throw FormatError("signature must be 64 bytes (128 hex chars)");
    Signature sig;
    std::copy(raw.begin(), raw.end(), sig.bytes.begin());
    return sig;
  }
};

struct KeyPair {
  Role role{};
  std::array<std::uint8_t, 32> private_scalar{};
  PublicKey public_point{};
};

inline PublicKey encode_point(const p256::Affine& pt) {
  PublicKey pk;
  pk.bytes[0] = 0x04;
  auto xb = pt.x.to_be_bytes();
  auto yb = pt.y.to_be_bytes();
  std::copy(xb.begin(), xb.end(), pk.bytes.begin() + 1);
  std::copy(yb.begin(), yb.end(), pk.bytes.begin() + 33);
  return pk;
}

// Rejects anything that is not a valid curve point.
inline p256::Affine decode_point(const PublicKey& pk) {
  if (pk.bytes[0] != 0x04) throw InvalidKeyError("public key is not an uncompressed point");
  p256::Affine pt;
  pt.x = U256::from_be_bytes(std::span<const std::uint8_t, 32>(pk.bytes.data() + 1, 32));
  pt.y = U256::from_be_bytes(std::span<const std::uint8_t, 32>(pk.bytes.data() + 33, 32));
  pt.infinity = false;
  if (!p256::on_curve(pt)) throw InvalidKeyError("public key is not on the curve");
  return pt;
}

inline KeyPair keypair_from_private(Role role, std::span<const std::uint8_t, 32> scalar) {
  U256 d = U256::from_be_bytes(scalar);
  if (d.is_zero() || !(d < p256::order_value()))
    throw InvalidKeyError("private scalar out of range [1, n-1]");
  KeyPair kp;
  kp.role = role;
  std::copy(scalar.begin(), scalar.end(), kp.private_scalar.begin());
  kp.public_point = encode_point(p256::scalar_mul_base(d));
  return kp;
}

inline KeyPair generate_keypair(Role role) {
  for (;;) {
    auto raw = random_array<32>();
    U256 d = U256::from_be_bytes(raw);
    if (d.is_zero() || !(d < p256::order_value())) continue;
    return keypair_from_private(role, raw);
  }
}

namespace detail {

// int(h) mod n; h < 2^256 < 2n so a single conditional subtract reduces it.
inline U256 digest_to_scalar(const Digest& h) {
  U256 e = U256::from_be_bytes(h);
  if (!(e < p256::order_value())) {
    U256 reduced;
    sub_borrow(e, p256::order_value(), reduced);
    return reduced;
  }
  return e;
}

inline std::optional<Signature> sign_attempt(const U256& d, const Digest& digest,
                                             const U256& k) {
  const MontCtx& n = p256::order();
  p256::Affine big_r = p256::scalar_mul_base(k);
  U256 r = big_r.x;
  if (!(r < n.modulus())) sub_borrow(big_r.x, n.modulus(), r);
  if (r.is_zero()) return std::nullopt;

  U256 e = digest_to_scalar(digest);
  U256 s_m = n.mul(n.inverse(n.to_mont(k)),
                   n.add(n.to_mont(e), n.mul(n.to_mont(r), n.to_mont(d))));
  U256 s = n.from_mont(s_m);
  if (s.is_zero()) return std::nullopt;

  Signature sig;
  auto rb = r.to_be_bytes();
  auto sb = s.to_be_bytes();
  std::copy(rb.begin(), rb.end(), sig.bytes.begin());
  std::copy(sb.begin(), sb.end(), sig.bytes.begin() + 32);
  return sig;
}

}  // namespace detail

// Deterministic variant with a caller-supplied nonce; used by the
// known-answer tests and anywhere reproducible signatures are needed.
inline Signature ecdsa_sign_with_nonce(std::span<const std::uint8_t, 32> sk,
                                       const Digest& digest,
                                       std::span<const std::uint8_t, 32> nonce) {
  U256 d = U256::from_be_bytes(sk);
  if (d.is_zero() || !(d < p256::order_value()))
    throw InvalidKeyError("private scalar out of range [1, n-1]");
  U256 k = U256::from_be_bytes(nonce);
  if (k.is_zero() || !(k < p256::order_value()))
    throw CryptoError("nonce out of range [1, n-1]");
  auto sig = detail::sign_attempt(d, digest, k);
  if (!sig) throw CryptoError("nonce produced a zero signature component");
  return *sig;
}

// Signs a precomputed digest with a fresh random nonce per signature,
// retrying on the (negligible-probability) zero components.
inline Signature ecdsa_sign(const KeyPair& kp, const Digest& digest) {
  U256 d = U256::from_be_bytes(std::span<const std::uint8_t, 32>(kp.private_scalar));
  if (d.is_zero() || !(d < p256::order_value()))
    throw InvalidKeyError("private scalar out of range [1, n-1]");
  for (;;) {
    auto raw = random_array<32>();
    U256 k = U256::from_be_bytes(raw);
    if (k.is_zero() || !(k < p256::order_value())) continue;
    if (auto sig = detail::sign_attempt(d, digest, k)) return *sig;
  }
}

// True iff the signature verifies. Malformed signatures yield false;
// a public key that is not on the curve raises InvalidKeyError instead.
inline bool ecdsa_verify(const PublicKey& pk, const Digest& digest, const Signature& sig) {
  p256::Affine q = decode_point(pk);

  U256 r = U256::from_be_bytes(std::span<const std::uint8_t, 32>(sig.bytes.data(), 32));
  U256 s = U256::from_be_bytes(std::span<const std::uint8_t, 32>(sig.bytes.data() + 32, 32));
  const MontCtx& n = p256::order();
  if (r.is_zero() || s.is_zero()) return false;
  if (!(r < n.modulus()) || !(s < n.modulus())) return false;

  U256 e = detail::digest_to_scalar(digest);
  U256 w = n.inverse(n.to_mont(s));
  U256 u1 = n.from_mont(n.mul(n.to_mont(e), w));
  U256 u2 = n.from_mont(n.mul(n.to_mont(r), w));

  p256::Affine x = p256::double_scalar_mul(u1, u2, q);
  if (x.infinity) return false;
  U256 xr = x.x;
  if (!(xr < n.modulus())) sub_borrow(x.x, n.modulus(), xr);
  return xr == r;
}

}  // namespace destine::crypto
