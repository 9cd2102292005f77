#pragma once

#include <string>

#include "httplib.h"
#include "json.hpp"

#include "destine/errors.hpp"
#include "destine/store/content_store.hpp"

namespace destine::store {

// Client for an external IPFS daemon's HTTP RPC (kubo-compatible):
// POST /api/v0/add for uploads, /api/v0/cat for retrieval. Returned CID
// strings are treated as opaque truth.
class IpfsStore final : public ContentStore {
 public:
  explicit IpfsStore(std::string base_url) : base_url_(std::move(base_url)) {}

  ContentId put(ByteSpan content) override {
    if (content.empty()) throw std::invalid_argument("content must be nonempty");
    httplib::Client cli = make_client();
    httplib::MultipartFormDataItems items = {
        {"file", std::string(content.begin(), content.end()), "blob",
         "application/octet-stream"}};
    auto res = cli.Post("/api/v0/add", items);
    if (!res) throw TransportError("ipfs daemon unreachable at " + base_url_ + " (add)");
    if (res->status != 200)
      throw StorageError("ipfs add failed with status " + std::to_string(res->status));

    // The daemon streams one JSON object per line; the final one carries
    // the root CID.
    std::string last_line;
    std::size_t start = 0;
    while (start < res->body.size()) {
      std::size_t end = res->body.find('\n', start);
      if (end == std::string::npos) end = res->body.size();
      if (end > start) last_line = res->body.substr(start, end - start);
      start = end + 1;
    }
    try {
      auto j = nlohmann::json::parse(last_line);
      std::string cid = j.at("Hash").get<std::string>();
      if (cid.empty()) throw StorageError("ipfs add returned an empty CID");
      return ContentId{cid};
    } catch (const nlohmann::json::exception&) {
      throw StorageError("unparseable ipfs add response");
    }
  }

  Bytes get(const ContentId& id) override {
    httplib::Client cli = make_client();
    auto res = cli.Post(("/api/v0/cat?arg=" + url_encode(id.text)).c_str(), "", "text/plain");
    if (!res) throw TransportError("ipfs daemon unreachable at " + base_url_ + " (cat)");
    if (res->status != 200) throw NotFoundError("ipfs cat failed for " + id.text);
    return Bytes(res->body.begin(), res->body.end());
  }

  bool has(const ContentId& id) override {
    httplib::Client cli = make_client();
    auto res = cli.Post(("/api/v0/block/stat?arg=" + url_encode(id.text)).c_str(), "",
                        "text/plain");
    if (!res)
      throw TransportError("ipfs daemon unreachable at " + base_url_ + " (block/stat)");
    return res->status == 200;
  }

  std::string backend_name() const override { return "ipfs"; }

  bool reachable() override {
    httplib::Client cli = make_client();
    auto res = cli.Post("/api/v0/version", "", "text/plain");
    return res && res->status == 200;
  }

 private:
  httplib::Client make_client() const {
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(5, 0);
    cli.set_read_timeout(60, 0);
    return cli;
  }

  static std::string url_encode(const std::string& s) {
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
      if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
        out.push_back(static_cast<char>(c));
      } else {
        out.push_back('%');
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0x0f]);
      }
    }
    return out;
  }

  std::string base_url_;
};

}  // namespace destine::store
