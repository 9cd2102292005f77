#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "destine/chain/chain.hpp"
#include "destine/crypto/gcm.hpp"
#include "destine/errors.hpp"
#include "destine/fsutil.hpp"

namespace destine::persist {

using crypto::SymmetricKey;

// On-disk container: "DESTBLK1" magic, one version byte, 12-byte IV, then
// ciphertext followed by the 16-byte tag. The magic and version are bound
// into the AEAD as additional authenticated data.
inline constexpr std::array<std::uint8_t, 8> kMagic = {'D', 'E', 'S', 'T',
                                                       'B', 'L', 'K', '1'};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 8 + 1 + 12;
inline constexpr std::size_t kTagSize = 16;

namespace detail {

inline std::array<std::uint8_t, 9> aad() {
  std::array<std::uint8_t, 9> a{};
  std::copy(kMagic.begin(), kMagic.end(), a.begin());
  a[8] = kVersion;
  return a;
}

}  // namespace detail

// Seals the canonical chain JSON and writes the container atomically.
// Refuses structurally invalid chains; signature validity is maintained by
// Chain's construction discipline and re-checked wholesale on load.
inline void save_chain(const chain::Chain& c, const SymmetricKey& key,
                       const std::filesystem::path& path) {
  chain::VerifyReport report = chain::detail::verify_structure(c);
  if (!report.ok)
    throw IntegrityError("refusing to persist invalid chain (block " +
                             std::to_string(report.first_bad_index) + ": " + report.reason +
                             ")",
                         report.first_bad_index);

  std::string plaintext = chain::chain_to_canonical_json(c);
  auto aad = detail::aad();
  crypto::AeadSealed sealed = crypto::aead_encrypt(key, as_bytes(plaintext), aad);

  Bytes file;
  file.reserve(kHeaderSize + sealed.ciphertext.size() + kTagSize);
  file.insert(file.end(), kMagic.begin(), kMagic.end());
  file.push_back(kVersion);
  file.insert(file.end(), sealed.iv.begin(), sealed.iv.end());
  file.insert(file.end(), sealed.ciphertext.begin(), sealed.ciphertext.end());
  file.insert(file.end(), sealed.tag.begin(), sealed.tag.end());
  write_file_atomic(path, file);
}

// Loads, authenticates, parses and fully verifies a chain. Needs only the
// symmetric key; the public keys travel inside the chain itself.
inline chain::Chain load_chain(const std::filesystem::path& path, const SymmetricKey& key) {
  Bytes file = read_file(path);
  if (file.size() < kHeaderSize + kTagSize)
    throw FormatError("container truncated: " + path.string());
  if (!std::equal(kMagic.begin(), kMagic.end(), file.begin()))
    throw FormatError("bad container magic: " + path.string());
  if (file[8] != kVersion)
    throw FormatError("unsupported container version " + std::to_string(file[8]));

  crypto::AeadSealed sealed;
  std::copy(file.begin() + 9, file.begin() + 9 + 12, sealed.iv.begin());
  sealed.ciphertext.assign(file.begin() + kHeaderSize, file.end() - kTagSize);
  std::copy(file.end() - kTagSize, file.end(), sealed.tag.begin());

  auto aad = detail::aad();
  Bytes plaintext = crypto::aead_decrypt(key, sealed, aad);

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(plaintext);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(std::string("chain JSON unparseable after decryption: ") +
                          e.what());
  }
  chain::Chain c = chain::chain_from_json(j);

  chain::VerifyReport report = chain::verify_chain(c);
  if (!report.ok)
    throw IntegrityError("loaded chain fails verification at block " +
                             std::to_string(report.first_bad_index) + ": " + report.reason,
                         report.first_bad_index);
  return c;
}

// Reads a 64-hex-char AES-256 key from a file path or, with the "env:NAME"
// form, from an environment variable. Surrounding whitespace is tolerated.
inline SymmetricKey load_symmetric_key(const std::string& source) {
  std::string text;
  if (source.rfind("env:", 0) == 0) {
    const char* v = std::getenv(source.substr(4).c_str());
    if (!v) throw ConfigError("environment variable not set: " + source.substr(4));
    text = v;
  } else {
    try {
      text = read_text_file(source);
    } catch (const StorageError& e) {
      throw ConfigError(std::string("cannot read key file: ") + e.what());
    }
  }
  text = trim(text);
  if (text.size() != 64)
    throw ConfigError("symmetric key must be 64 hex chars, got " +
                      std::to_string(text.size()));
  Bytes raw;
  try {
    raw = from_hex(text);
  } catch (const std::invalid_argument&) {
    throw ConfigError("symmetric key is not valid hex");
  }
  SymmetricKey key;
  std::copy(raw.begin(), raw.end(), key.bytes.begin());
  return key;
}

}  // namespace destine::persist
