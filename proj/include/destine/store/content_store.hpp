#pragma once

#include <filesystem>
#include <string>

#include "destine/crypto/sha256.hpp"
#include "destine/errors.hpp"
#include "destine/fsutil.hpp"
#include "destine/store/content_id.hpp"

namespace destine::store {

// File storage keyed by content identifier. put/get/has are safe for
// concurrent use in every backend.
class ContentStore {
 public:
  virtual ~ContentStore() = default;

  // Stores content and returns its id; idempotent for identical bytes.
  virtual ContentId put(ByteSpan content) = 0;

  // Exact original bytes for a known id.
  virtual Bytes get(const ContentId& id) = 0;

  // True iff get(id) would succeed without an integrity error.
  virtual bool has(const ContentId& id) = 0;

  virtual std::string backend_name() const = 0;

  // Backend liveness for health reporting.
  virtual bool reachable() = 0;
};

// Content-addressed store on the local filesystem: one blob per file at
// <root>/objects/<first two hex>/<hex>, ids of the form "sha256:<64 hex>".
// Append-only by design; there is no delete.
class LocalStore final : public ContentStore {
 public:
  explicit LocalStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_ / "objects", ec);
    if (ec) throw StorageError("cannot create store root " + root_.string());
  }

  ContentId put(ByteSpan content) override {
    if (content.empty()) throw std::invalid_argument("content must be nonempty");
    std::string hex = to_hex(crypto::sha256(content));
    std::filesystem::path path = blob_path(hex);
    if (!std::filesystem::exists(path)) write_file_atomic(path, content);
    return ContentId{"sha256:" + hex};
  }

  Bytes get(const ContentId& id) override {
    std::string hex = parse_id(id);
    std::filesystem::path path = blob_path(hex);
    if (!std::filesystem::exists(path))
      throw NotFoundError("no content stored for " + id.text);
    Bytes data = read_file(path);
    // Re-hash before returning: a corrupted blob must never be served.
    if (to_hex(crypto::sha256(data)) != hex)
      throw IntegrityError("stored content does not match its id: " + id.text);
    return data;
  }

  bool has(const ContentId& id) override {
    std::string hex;
    try {
      hex = parse_id(id);
    } catch (const NotFoundError&) {
      return false;
    }
    std::filesystem::path path = blob_path(hex);
    if (!std::filesystem::exists(path)) return false;
    return to_hex(crypto::sha256(read_file(path))) == hex;
  }

  std::string backend_name() const override { return "local"; }

  bool reachable() override { return std::filesystem::exists(root_ / "objects"); }

  const std::filesystem::path& root() const { return root_; }

 private:
  static std::string parse_id(const ContentId& id) {
    constexpr std::string_view prefix = "sha256:";
    if (id.text.size() != prefix.size() + 64 || id.text.rfind(prefix, 0) != 0)
      throw NotFoundError("not a local content id: " + id.text);
    std::string hex = id.text.substr(prefix.size());
    for (char c : hex) {
      if (hex_nibble(c) < 0 || (c >= 'A' && c <= 'F'))
        throw NotFoundError("not a local content id: " + id.text);
    }
    return hex;
  }

  std::filesystem::path blob_path(const std::string& hex) const {
    return root_ / "objects" / hex.substr(0, 2) / hex;
  }

  std::filesystem::path root_;
};

}  // namespace destine::store
