#include <gtest/gtest.h>

#include <random>

#include "destine/crypto/ecdsa.hpp"
#include "ec_oracle.hpp"
#include "test_util.hpp"

using namespace destine::crypto;
using destine::Bytes;

namespace {

std::array<std::uint8_t, 32> arr32(const Bytes& b) {
  std::array<std::uint8_t, 32> a{};
  std::copy(b.begin(), b.end(), a.begin());
  return a;
}

Digest random_digest(std::mt19937_64& rng) {
  Digest d;
  for (auto& b : d) b = static_cast<std::uint8_t>(rng());
  return d;
}

}  // namespace

// Fixed-nonce vectors frozen from the independent oracle: exact (r, s) match.
TEST(Ecdsa, FixedNonceKnownAnswers) {
  auto vectors = testutil::load_vectors("ecdsa_p256_kat.json");
  ASSERT_GE(vectors.size(), 2u);
  for (const auto& v : vectors) {
    auto sk = arr32(testutil::hex(v["d"]));
    auto nonce = arr32(testutil::hex(v["k"]));
    Digest digest = arr32(testutil::hex(v["digest"]));

    KeyPair kp = keypair_from_private(Role::uploader, sk);
    EXPECT_EQ(kp.public_point.to_hex(),
              "04" + v["qx"].get<std::string>() + v["qy"].get<std::string>())
        << v["name"];

    Signature sig = ecdsa_sign_with_nonce(sk, digest, nonce);
    EXPECT_EQ(sig.to_hex(), v["r"].get<std::string>() + v["s"].get<std::string>())
        << v["name"];
    EXPECT_TRUE(ecdsa_verify(kp.public_point, digest, sig));
  }
}

// The stored public point equals d*G recomputed with the independent oracle.
TEST(Ecdsa, PublicPointMatchesScalarMultOracle) {
  KeyPair kp = generate_keypair(Role::admin);
  ec_oracle::Pt q = ec_oracle::mul_base(
      ec_oracle::from_hex(destine::to_hex(kp.private_scalar)));
  EXPECT_EQ(kp.public_point.to_hex(),
            "04" + ec_oracle::to_hex64(q.x) + ec_oracle::to_hex64(q.y));
}

TEST(Ecdsa, GenerateTwiceDistinct) {
  KeyPair a = generate_keypair(Role::admin);
  KeyPair b = generate_keypair(Role::admin);
  EXPECT_NE(a.private_scalar, b.private_scalar);
  EXPECT_NE(a.public_point, b.public_point);
}

TEST(Ecdsa, SignVerifyRoundTrip) {
  std::mt19937_64 rng(5);
  KeyPair kp = generate_keypair(Role::uploader);
  for (int i = 0; i < 10; ++i) {
    Digest d = random_digest(rng);
    Signature sig = ecdsa_sign(kp, d);
    EXPECT_TRUE(ecdsa_verify(kp.public_point, d, sig));
  }
}

TEST(Ecdsa, WrongMessageRejected) {
  std::mt19937_64 rng(6);
  KeyPair kp = generate_keypair(Role::uploader);
  Digest d = random_digest(rng);
  Signature sig = ecdsa_sign(kp, d);
  Digest other = random_digest(rng);
  EXPECT_FALSE(ecdsa_verify(kp.public_point, other, sig));
}

TEST(Ecdsa, WrongKeyRejected) {
  std::mt19937_64 rng(7);
  KeyPair kp = generate_keypair(Role::uploader);
  KeyPair unrelated = generate_keypair(Role::uploader);
  Digest d = random_digest(rng);
  Signature sig = ecdsa_sign(kp, d);
  EXPECT_FALSE(ecdsa_verify(unrelated.public_point, d, sig));
}

// Perturbing any single bit of the signature must invalidate it.
TEST(Ecdsa, AnySignatureBitFlipRejected) {
  std::mt19937_64 rng(8);
  KeyPair kp = generate_keypair(Role::uploader);
  Digest d = random_digest(rng);
  Signature sig = ecdsa_sign(kp, d);
  for (std::size_t byte = 0; byte < sig.bytes.size(); ++byte) {
    for (int bit = 0; bit < 8; ++bit) {
      Signature bad = sig;
      bad.bytes[byte] ^= static_cast<std::uint8_t>(1u << bit);
      EXPECT_FALSE(ecdsa_verify(kp.public_point, d, bad))
          << "byte " << byte << " bit " << bit;
    }
  }
}

// r and s outside [1, n-1] are range-rejected, not errors.
TEST(Ecdsa, OutOfRangeComponentsRejected) {
  std::mt19937_64 rng(9);
  KeyPair kp = generate_keypair(Role::uploader);
  Digest d = random_digest(rng);
  Signature sig = ecdsa_sign(kp, d);

  Signature zero_s = sig;
  std::fill(zero_s.bytes.begin() + 32, zero_s.bytes.end(), 0);
  EXPECT_FALSE(ecdsa_verify(kp.public_point, d, zero_s));

  Signature zero_r = sig;
  std::fill(zero_r.bytes.begin(), zero_r.bytes.begin() + 32, 0);
  EXPECT_FALSE(ecdsa_verify(kp.public_point, d, zero_r));

  // s = n exactly.
  Signature s_eq_n = sig;
  auto n_bytes = p256::order_value().to_be_bytes();
  std::copy(n_bytes.begin(), n_bytes.end(), s_eq_n.bytes.begin() + 32);
  EXPECT_FALSE(ecdsa_verify(kp.public_point, d, s_eq_n));
}

// An off-curve public key is an explicit error, distinct from `false`.
TEST(Ecdsa, OffCurveKeyRaises) {
  std::mt19937_64 rng(10);
  KeyPair kp = generate_keypair(Role::uploader);
  Digest d = random_digest(rng);
  Signature sig = ecdsa_sign(kp, d);

  PublicKey bad = kp.public_point;
  bad.bytes[40] ^= 0x01;
  EXPECT_THROW(ecdsa_verify(bad, d, sig), destine::InvalidKeyError);

  PublicKey compressed = kp.public_point;
  compressed.bytes[0] = 0x02;
  EXPECT_THROW(ecdsa_verify(compressed, d, sig), destine::InvalidKeyError);
}

TEST(Ecdsa, KeyAndSignatureHexForms) {
  KeyPair kp = generate_keypair(Role::admin);
  EXPECT_EQ(kp.public_point.to_hex().size(), 130u);
  EXPECT_EQ(PublicKey::from_hex(kp.public_point.to_hex()), kp.public_point);

  Digest d{};
  d[0] = 1;
  Signature sig = ecdsa_sign(kp, d);
  EXPECT_EQ(sig.to_hex().size(), 128u);
  EXPECT_EQ(Signature::from_hex(sig.to_hex()), sig);

  EXPECT_THROW(PublicKey::from_hex("04abcd"), destine::FormatError);
  EXPECT_THROW(Signature::from_hex("ff"), destine::FormatError);
}

TEST(Ecdsa, PrivateScalarRangeEnforced) {
  std::array<std::uint8_t, 32> zero{};
  EXPECT_THROW(keypair_from_private(Role::admin, zero), destine::InvalidKeyError);
  auto n_bytes = p256::order_value().to_be_bytes();
  EXPECT_THROW(keypair_from_private(Role::admin, n_bytes), destine::InvalidKeyError);
}
