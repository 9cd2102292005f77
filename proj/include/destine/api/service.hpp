#pragma once

#include <map>
#include <thread>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "destine/chain/chain.hpp"
#include "destine/persist/container.hpp"
#include "destine/store/content_store.hpp"

namespace destine::api {

struct ServiceOptions {
  std::int64_t ttl_ms = 60000;
  std::size_t max_pending = 64;
};

// HTTP JSON service for the upload and retrieval workflows. Uploads are
// two-phase: the uploader must sign the candidate hash, which depends on
// server-side index/tip/timestamp, so prepare returns the candidate and
// commit supplies the signature. The admin key lives in the service and
// co-signs at commit time. All chain mutation is serialized under one lock;
// at most one commit per tip can succeed.
class Service {
 public:
  Service(chain::Chain chain, crypto::KeyPair admin,
          std::vector<crypto::PublicKey> authorized_uploaders, store::ContentStore& content,
          crypto::SymmetricKey key, std::filesystem::path chain_path,
          ServiceOptions options = {})
      : chain_(std::move(chain)),
        admin_(std::move(admin)),
        authorized_(std::move(authorized_uploaders)),
        content_(content),
        key_(key),
        chain_path_(std::move(chain_path)),
        options_(options) {
    routes();
  }

  // Binds host:port (port 0 picks an ephemeral one) and returns the actual
  // port. Serving starts with serve_blocking() or start_ephemeral().
  int bind(const std::string& host, int port) {
    int actual = port == 0 ? server_.bind_to_any_port(host)
                           : (server_.bind_to_port(host, port) ? port : -1);
    if (actual <= 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return actual;
  }

  void serve_blocking() { server_.listen_after_bind(); }

  // Bind + serve on a background thread; returns the port once ready.
  int start_ephemeral(const std::string& host) {
    int port = bind(host, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port;
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  ~Service() { stop(); }

 private:
  struct Pending {
    chain::Candidate candidate;
    crypto::PublicKey uploader_pub;
    std::int64_t created_at = 0;
    std::int64_t expires_at = 0;
  };

  static void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void routes() {
    server_.Post("/upload/prepare", [this](const httplib::Request& req,
                                           httplib::Response& res) { prepare(req, res); });
    server_.Post("/upload/commit", [this](const httplib::Request& req,
                                          httplib::Response& res) { commit(req, res); });
    server_.Get(R"(/file/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      file(req.matches[1], res);
    });
    server_.Get(R"(/block/(\d+))", [this](const httplib::Request& req,
                                          httplib::Response& res) {
      std::size_t index = std::stoull(req.matches[1]);
      std::lock_guard lock(mu_);
      if (index >= chain_.size()) {
        reply(res, 404, {{"error", "no block at index " + std::to_string(index)}});
        return;
      }
      reply(res, 200, chain::block_to_json(chain_.at(index)));
    });
    server_.Get("/chain", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mu_);
      reply(res, 200, chain::chain_to_json(chain_));
    });
    server_.Get("/verify", [this](const httplib::Request&, httplib::Response& res) {
      chain::VerifyReport report;
      {
        std::lock_guard lock(mu_);
        report = chain::verify_chain(chain_);
      }
      if (report.ok) {
        reply(res, 200, {{"ok", true}});
      } else {
        reply(res, 200, {{"ok", false},
                         {"first_failure", report.first_bad_index},
                         {"reason", report.reason}});
      }
    });
    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      bool reachable = false;
      try {
        reachable = content_.reachable();
      } catch (const Error&) {
      }
      reply(res, 200,
            {{"ok", true}, {"backend", content_.backend_name()},
             {"store_reachable", reachable}});
    });
  }

  void prepare(const httplib::Request& req, httplib::Response& res) {
    std::string key_hex = req.get_header_value("X-Uploader-Key");
    if (key_hex.empty()) {
      reply(res, 400, {{"error", "missing X-Uploader-Key header"}});
      return;
    }
    crypto::PublicKey uploader_pub;
    try {
      uploader_pub = crypto::PublicKey::from_hex(key_hex);
    } catch (const std::exception&) {
      reply(res, 400, {{"error", "malformed uploader key"}});
      return;
    }
    if (!is_authorized(uploader_pub)) {
      reply(res, 403, {{"error", "uploader key is not in the authorized set"}});
      return;
    }
    if (req.body.empty()) {
      reply(res, 400, {{"error", "empty upload body"}});
      return;
    }

    store::ContentId cid;
    try {
      cid = content_.put(as_bytes(req.body));
    } catch (const Error& e) {
      reply(res, 502, {{"error", std::string("store failure: ") + e.what()}});
      return;
    }

    std::lock_guard lock(mu_);
    std::int64_t now = now_ms();
    chain::Candidate cand = chain::build_candidate(chain_, cid, now);
    Pending pending{cand, uploader_pub, now, now + options_.ttl_ms};
    std::string cand_hex = to_hex(cand.hash);
    if (pending_.size() >= options_.max_pending) evict_oldest();
    pending_[cand_hex] = std::move(pending);

    reply(res, 200, {{"candidate_hash", cand_hex},
                     {"index", cand.index},
                     {"cid", cid.text},
                     {"expires_at", now + options_.ttl_ms}});
  }

  void commit(const httplib::Request& req, httplib::Response& res) {
    std::string cand_hex, sig_hex;
    try {
      auto body = nlohmann::json::parse(req.body);
      cand_hex = body.at("candidate_hash").get<std::string>();
      sig_hex = body.at("sig_uploader").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      reply(res, 400, {{"error", "commit body must be JSON with candidate_hash and sig_uploader"}});
      return;
    }
    crypto::Signature sig_uploader;
    try {
      sig_uploader = crypto::Signature::from_hex(sig_hex);
    } catch (const std::exception&) {
      reply(res, 400, {{"error", "malformed signature"}, {"role", "uploader"}});
      return;
    }

    std::lock_guard lock(mu_);
    auto it = pending_.find(cand_hex);
    if (it == pending_.end()) {
      reply(res, 404, {{"error", "unknown candidate"}});
      return;
    }
    std::int64_t now = now_ms();
    if (now >= it->second.expires_at) {
      pending_.erase(it);
      reply(res, 410, {{"error", "candidate expired; re-prepare"}});
      return;
    }
    const Pending& pending = it->second;

    if (!pending.candidate.prev_hash ||
        !(*pending.candidate.prev_hash == chain_.tip().hash)) {
      pending_.erase(it);
      reply(res, 409, {{"error", "stale tip"}, {"hint", "re-prepare against the new tip"}});
      return;
    }

    if (!crypto::ecdsa_verify(pending.uploader_pub, pending.candidate.hash, sig_uploader)) {
      reply(res, 400, {{"error", "bad signature"}, {"role", "uploader"}});
      return;
    }

    crypto::Signature sig_admin = crypto::ecdsa_sign(admin_, pending.candidate.hash);

    // Append on a copy, persist, then swap in: chain state and disk never
    // diverge even if the write fails.
    chain::Chain next = chain_;
    try {
      chain::append_block(next, pending.candidate, sig_uploader, sig_admin,
                          pending.uploader_pub, admin_.public_point, authorized_);
    } catch (const SignatureRejectedError& e) {
      reply(res, 400, {{"error", e.what()}, {"role", e.role}});
      return;
    } catch (const StaleTipError& e) {
      pending_.erase(it);
      reply(res, 409, {{"error", e.what()}, {"hint", "re-prepare against the new tip"}});
      return;
    } catch (const Error& e) {
      reply(res, 400, {{"error", e.what()}});
      return;
    }
    try {
      persist::save_chain(next, key_, chain_path_);
    } catch (const Error& e) {
      reply(res, 500, {{"error", std::string("persist failed: ") + e.what()}});
      return;
    }
    chain_ = std::move(next);
    pending_.erase(it);
    reply(res, 200, {{"block", chain::block_to_json(chain_.tip())}});
  }

  void file(const std::string& cid_text, httplib::Response& res) {
    std::size_t block_index = 0;
    {
      std::lock_guard lock(mu_);
      bool found = false;
      for (const auto& b : chain_.blocks()) {
        if (b.cid == cid_text) {
          block_index = b.index;
          found = true;
          break;
        }
      }
      if (!found) {
        reply(res, 404, {{"error", "cid not recorded on chain"}});
        return;
      }
    }
    try {
      Bytes data = content_.get(store::ContentId{cid_text});
      res.set_header("X-Block-Index", std::to_string(block_index));
      res.set_content(std::string(data.begin(), data.end()), "application/octet-stream");
    } catch (const TransportError& e) {
      reply(res, 502, {{"error", e.what()}});
    } catch (const Error& e) {
      // Chain says the cid exists but the store cannot produce clean bytes.
      reply(res, 500, {{"error", std::string("integrity alert: ") + e.what()}});
    }
  }

  bool is_authorized(const crypto::PublicKey& pk) const {
    for (const auto& candidate : authorized_) {
      if (candidate == pk) return true;
    }
    return false;
  }

  void evict_oldest() {
    auto oldest = pending_.begin();
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      if (it->second.created_at < oldest->second.created_at) oldest = it;
    }
    if (oldest != pending_.end()) pending_.erase(oldest);
  }

  httplib::Server server_;
  std::thread thread_;

  std::mutex mu_;
  chain::Chain chain_;
  std::map<std::string, Pending> pending_;

  crypto::KeyPair admin_;
  std::vector<crypto::PublicKey> authorized_;
  store::ContentStore& content_;
  crypto::SymmetricKey key_;
  std::filesystem::path chain_path_;
  ServiceOptions options_;
};

}  // namespace destine::api
