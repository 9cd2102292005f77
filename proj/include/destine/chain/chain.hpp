#pragma once

#include <span>
#include <utility>
#include <vector>

#include "destine/chain/block.hpp"
#include "destine/store/content_id.hpp"

namespace destine::chain {

using store::ContentId;

// Hash-linked sequence of blocks. Mutation goes through create_genesis /
// append_block only, both of which enforce the dual-signature rule, so a
// Chain obtained through those paths always satisfies verify_chain.
// from_blocks() is the deserialization escape hatch and performs no checks;
// load paths must call verify_chain afterwards.
class Chain {
 public:
  explicit Chain(Block genesis) { blocks_.push_back(std::move(genesis)); }

  static Chain from_blocks(std::vector<Block> blocks) {
    Chain c;
    c.blocks_ = std::move(blocks);
    return c;
  }

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }
  const Block& at(std::size_t i) const { return blocks_.at(i); }
  const Block& tip() const { return blocks_.back(); }

 private:
  Chain() = default;
  std::vector<Block> blocks_;

  friend void append_block(Chain&, const Candidate&, const Signature&, const Signature&,
                           const PublicKey&, const PublicKey&,
                           std::span<const PublicKey>);
};

struct VerifyReport {
  bool ok = true;
  std::size_t first_bad_index = 0;
  std::string reason;
};

// Genesis: index 0, no predecessor, no content id, co-signed by both roles.
inline Block create_genesis(const crypto::KeyPair& admin, const crypto::KeyPair& uploader,
                            std::int64_t timestamp_ms) {
  Block b;
  b.index = 0;
  b.timestamp_ms = timestamp_ms;
  b.prev_hash = std::nullopt;
  b.cid.clear();
  b.owner_pub = admin.public_point;
  b.uploader_pub = uploader.public_point;
  b.hash = block_hash(0, timestamp_ms, std::nullopt, "");
  b.sig_uploader = crypto::ecdsa_sign(uploader, b.hash);
  b.sig_admin = crypto::ecdsa_sign(admin, b.hash);
  return b;
}

// Unsigned header over the current tip for a new content id.
inline Candidate build_candidate(const Chain& chain, const ContentId& cid,
                                 std::int64_t timestamp_ms) {
  if (chain.empty()) throw Error("chain not initialized: create a genesis block first");
  if (cid.text.empty()) throw std::invalid_argument("content id must be nonempty");
  Candidate c;
  c.index = chain.size();
  c.timestamp_ms = timestamp_ms;
  c.prev_hash = chain.tip().hash;
  c.cid = cid.text;
  c.hash = block_hash(c.index, c.timestamp_ms, c.prev_hash, c.cid);
  return c;
}

// Appends only if the candidate still extends the tip, the uploader is
// authorized, and both signatures verify over the candidate hash. A failed
// append leaves the chain untouched.
inline void append_block(Chain& chain, const Candidate& candidate,
                         const Signature& sig_uploader, const Signature& sig_admin,
                         const PublicKey& uploader_pub, const PublicKey& owner_pub,
                         std::span<const PublicKey> authorized_uploaders) {
  if (chain.empty()) throw Error("chain not initialized: create a genesis block first");
  if (candidate.cid.empty()) throw std::invalid_argument("content id must be nonempty");

  if (candidate.index != chain.size() || !candidate.prev_hash ||
      !(*candidate.prev_hash == chain.tip().hash)) {
    throw StaleTipError("candidate does not extend the current tip; re-prepare");
  }

  Digest expected =
      block_hash(candidate.index, candidate.timestamp_ms, candidate.prev_hash, candidate.cid);
  if (expected != candidate.hash)
    throw FormatError("candidate hash does not match its preimage");

  bool authorized = false;
  for (const auto& pk : authorized_uploaders) {
    if (pk == uploader_pub) {
      authorized = true;
      break;
    }
  }
  if (!authorized) throw AuthorizationError("uploader key is not in the authorized set");

  if (!crypto::ecdsa_verify(uploader_pub, candidate.hash, sig_uploader))
    throw SignatureRejectedError("uploader signature does not verify", "uploader");
  if (!crypto::ecdsa_verify(owner_pub, candidate.hash, sig_admin))
    throw SignatureRejectedError("admin signature does not verify", "admin");

  Block b;
  b.index = candidate.index;
  b.timestamp_ms = candidate.timestamp_ms;
  b.prev_hash = candidate.prev_hash;
  b.cid = candidate.cid;
  b.owner_pub = owner_pub;
  b.uploader_pub = uploader_pub;
  b.hash = candidate.hash;
  b.sig_uploader = sig_uploader;
  b.sig_admin = sig_admin;
  chain.blocks_.push_back(std::move(b));
}

namespace detail {

// Shape, linkage and hash checks; everything except signature verification.
inline VerifyReport verify_structure(const Chain& chain) {
  if (chain.empty()) return {false, 0, "chain is empty"};
  const auto& blocks = chain.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (b.index != i) return {false, i, "index mismatch"};
    if (i == 0) {
      if (b.prev_hash) return {false, i, "genesis must have empty prev_hash"};
      if (!b.cid.empty()) return {false, i, "genesis must have empty cid"};
    } else {
      if (!b.prev_hash) return {false, i, "missing prev_hash"};
      if (b.cid.empty()) return {false, i, "missing cid"};
      if (!(*b.prev_hash == blocks[i - 1].hash)) return {false, i, "prev_hash link broken"};
    }
    if (block_hash(b.index, b.timestamp_ms, b.prev_hash, b.cid) != b.hash)
      return {false, i, "block hash does not match preimage"};
  }
  return {};
}

}  // namespace detail

// Full verification: structure plus both role signatures on every block.
// Malformed chains yield a failure report, never an exception.
inline VerifyReport verify_chain(const Chain& chain) {
  VerifyReport structural = detail::verify_structure(chain);
  if (!structural.ok) return structural;
  const auto& blocks = chain.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    try {
      if (!crypto::ecdsa_verify(b.uploader_pub, b.hash, b.sig_uploader))
        return {false, i, "uploader signature invalid"};
      if (!crypto::ecdsa_verify(b.owner_pub, b.hash, b.sig_admin))
        return {false, i, "admin signature invalid"};
    } catch (const InvalidKeyError& e) {
      return {false, i, std::string("malformed public key: ") + e.what()};
    }
  }
  return {};
}

inline nlohmann::json chain_to_json(const Chain& chain) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& b : chain.blocks()) arr.push_back(block_to_json(b));
  return nlohmann::json{{"blocks", std::move(arr)}};
}

// Canonical serialization: keys sorted lexicographically (nlohmann objects
// are std::map-backed), no insignificant whitespace.
inline std::string chain_to_canonical_json(const Chain& chain) {
  return chain_to_json(chain).dump();
}

inline Chain chain_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array())
    throw CorruptionError("chain JSON must be an object with a blocks array");
  std::vector<Block> blocks;
  blocks.reserve(j["blocks"].size());
  for (const auto& bj : j["blocks"]) blocks.push_back(block_from_json(bj));
  return Chain::from_blocks(std::move(blocks));
}

}  // namespace destine::chain
