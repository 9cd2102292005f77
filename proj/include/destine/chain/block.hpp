#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "destine/crypto/ecdsa.hpp"
#include "destine/crypto/sha256.hpp"
#include "destine/errors.hpp"

namespace destine::chain {

using crypto::Digest;
using crypto::PublicKey;
using crypto::Signature;

// One ledger record. Genesis is the only block with no predecessor hash and
// no content identifier; every block carries both role signatures over its
// own hash.
struct Block {
  std::uint64_t index = 0;
  std::int64_t timestamp_ms = 0;
  std::optional<Digest> prev_hash;  // nullopt only for genesis
  std::string cid;                  // empty only for genesis
  PublicKey owner_pub;
  PublicKey uploader_pub;
  Digest hash{};
  Signature sig_uploader;
  Signature sig_admin;
};

// Unsigned header produced before the co-signing round.
struct Candidate {
  std::uint64_t index = 0;
  std::int64_t timestamp_ms = 0;
  std::optional<Digest> prev_hash;
  std::string cid;
  Digest hash{};
};

// The byte string hashed into a block hash:
//   decimal(index) "|" decimal(timestamp_ms) "|" hex(prev_hash) "|" cid
// with empty hex / cid fields for genesis. The separator keeps field
// boundaries unambiguous.
inline Bytes hash_preimage(std::uint64_t index, std::int64_t timestamp_ms,
                           const std::optional<Digest>& prev_hash, std::string_view cid) {
  std::string s = std::to_string(index);
  s += '|';
  s += std::to_string(timestamp_ms);
  s += '|';
  if (prev_hash) s += to_hex(*prev_hash);
  s += '|';
  s += cid;
  return Bytes(s.begin(), s.end());
}

inline Digest block_hash(std::uint64_t index, std::int64_t timestamp_ms,
                         const std::optional<Digest>& prev_hash, std::string_view cid) {
  return crypto::sha256(hash_preimage(index, timestamp_ms, prev_hash, cid));
}

inline nlohmann::json block_to_json(const Block& b) {
  return nlohmann::json{
      {"index", b.index},
      {"timestamp_ms", b.timestamp_ms},
      {"prev_hash", b.prev_hash ? to_hex(*b.prev_hash) : ""},
      {"cid", b.cid},
      {"owner_pub", b.owner_pub.to_hex()},
      {"uploader_pub", b.uploader_pub.to_hex()},
      {"hash", to_hex(b.hash)},
      {"sig_uploader", b.sig_uploader.to_hex()},
      {"sig_admin", b.sig_admin.to_hex()},
  };
}

namespace detail {

inline Digest digest_from_hex(const std::string& hex) {
  Bytes raw = from_hex(hex);
  if (raw.size() != 32) throw CorruptionError("digest must be 32 bytes");
  Digest d;
  std::copy(raw.begin(), raw.end(), d.begin());
  return d;
}

}  // namespace detail

inline Block block_from_json(const nlohmann::json& j) {
  try {
    Block b;
    b.index = j.at("index").get<std::uint64_t>();
    b.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    std::string prev = j.at("prev_hash").get<std::string>();
    if (!prev.empty()) b.prev_hash = detail::digest_from_hex(prev);
    b.cid = j.at("cid").get<std::string>();
    b.owner_pub = PublicKey::from_hex(j.at("owner_pub").get<std::string>());
    b.uploader_pub = PublicKey::from_hex(j.at("uploader_pub").get<std::string>());
    b.hash = detail::digest_from_hex(j.at("hash").get<std::string>());
    b.sig_uploader = Signature::from_hex(j.at("sig_uploader").get<std::string>());
    b.sig_admin = Signature::from_hex(j.at("sig_admin").get<std::string>());
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(std::string("malformed block JSON: ") + e.what());
  } catch (const FormatError& e) {
    throw CorruptionError(std::string("malformed block field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CorruptionError(std::string("malformed block field: ") + e.what());
  }
}

}  // namespace destine::chain
