#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "destine/chain/chain.hpp"
#include "destine/persist/container.hpp"
#include "destine/store/content_store.hpp"

namespace destine::bench {

// One timed observation. vsz_mb is empty on platforms without per-process
// virtual-size accounting.
struct BenchRecord {
  int iteration = 0;
  std::string size_label;
  std::string op;  // "upload" | "retrieve"
  double elapsed_ms = 0;
  std::optional<double> vsz_mb;
};

// The four protocol sizes; kB means 1024 bytes here.
inline std::size_t size_from_label(const std::string& label) {
  if (label == "1k") return 1024;
  if (label == "10k") return 10240;
  if (label == "100k") return 102400;
  if (label == "1m") return 1048576;
  throw ConfigError("unknown size label '" + label + "' (expected 1k, 10k, 100k or 1m)");
}

// Deterministic pseudorandom payload of exactly size_bytes.
inline Bytes generate_payload(std::size_t size_bytes, std::uint64_t seed) {
  if (size_bytes < 1) throw std::invalid_argument("payload size must be >= 1");
  Bytes out(size_bytes);
  std::mt19937_64 rng(seed);
  std::size_t i = 0;
  while (i + 8 <= size_bytes) {
    std::uint64_t v = rng();
    std::memcpy(out.data() + i, &v, 8);
    i += 8;
  }
  while (i < size_bytes) out[i++] = static_cast<std::uint8_t>(rng());
  return out;
}

// Same length, contents distinct per iteration: the iteration counter is
// stamped big-endian over the first bytes.
inline Bytes mutate_payload(const Bytes& payload, std::uint64_t iteration) {
  if (payload.empty()) throw std::invalid_argument("payload must be nonempty");
  Bytes out = payload;
  std::uint8_t counter[8];
  store_be64(iteration, counter);
  std::size_t n = std::min<std::size_t>(8, out.size());
  std::copy(counter + (8 - n), counter + 8, out.begin());
  return out;
}

// Current process virtual memory size in MB, from /proc/self/status (VmSize).
inline std::optional<double> sample_vsz() {
  std::ifstream status("/proc/self/status");
  if (!status) return std::nullopt;
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmSize:", 0) == 0) {
      std::istringstream fields(line.substr(7));
      double kb = 0;
      std::string unit;
      if (fields >> kb >> unit) return kb / 1024.0;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

struct BenchConfig {
  std::vector<std::string> sizes{"1k", "10k", "100k", "1m"};
  int iters = 1000;
  std::uint64_t seed = 1;
  std::filesystem::path out_csv;
};

// Everything the upload pipeline needs. The chain mutates in place and is
// persisted after every accepted block, matching the operational path.
struct BenchEnv {
  crypto::KeyPair admin;
  crypto::KeyPair uploader;
  crypto::SymmetricKey key;
  std::filesystem::path chain_path;
  store::ContentStore& content;
  chain::Chain chain;
};

inline BenchEnv make_bench_env(store::ContentStore& content,
                               const std::filesystem::path& chain_path) {
  crypto::KeyPair admin = crypto::generate_keypair(crypto::Role::admin);
  crypto::KeyPair uploader = crypto::generate_keypair(crypto::Role::uploader);
  crypto::SymmetricKey key;
  crypto::secure_random(key.bytes);
  chain::Chain c(chain::create_genesis(admin, uploader, now_ms()));
  return BenchEnv{admin, uploader, key, chain_path, content, std::move(c)};
}

namespace detail {

inline double elapsed_ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

inline void write_record(std::ofstream& csv, const BenchRecord& r) {
  csv << r.iteration << ',' << r.size_label << ',' << r.op << ',';
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", r.elapsed_ms);
  csv << buf << ',';
  if (r.vsz_mb) {
    std::snprintf(buf, sizeof buf, "%.2f", *r.vsz_mb);
    csv << buf;
  }
  csv << '\n';
}

}  // namespace detail

// Runs the measurement protocol: for each size, `iters` uploads of mutated
// payloads (store put + candidate + both signatures + append + encrypted
// persist, timed end to end), then `iters` retrievals (chain lookup by cid +
// content get). Any failure aborts with the iteration number; a benchmark
// must not silently skip work.
inline std::vector<BenchRecord> run_benchmark(BenchEnv& env, const BenchConfig& config) {
  if (config.iters < 1) throw std::invalid_argument("iters must be >= 1");
  if (env.chain.empty()) throw Error("chain not initialized");

  std::ofstream csv;
  if (!config.out_csv.empty()) {
    csv.open(config.out_csv, std::ios::trunc);
    if (!csv) throw StorageError("cannot open CSV output " + config.out_csv.string());
    csv << "iteration,size,op,elapsed_ms,vsz_mb\n";
  }

  std::vector<crypto::PublicKey> authorized{env.uploader.public_point};
  std::vector<BenchRecord> records;
  records.reserve(config.sizes.size() * config.iters * 2);

  for (const std::string& label : config.sizes) {
    Bytes base = generate_payload(size_from_label(label), config.seed);
    std::vector<store::ContentId> cids;
    cids.reserve(config.iters);

    for (int iter = 1; iter <= config.iters; ++iter) {
      try {
        Bytes payload = mutate_payload(base, static_cast<std::uint64_t>(iter));
        auto start = std::chrono::steady_clock::now();
        store::ContentId cid = env.content.put(payload);
        chain::Candidate cand = chain::build_candidate(env.chain, cid, now_ms());
        crypto::Signature su = crypto::ecdsa_sign(env.uploader, cand.hash);
        crypto::Signature sa = crypto::ecdsa_sign(env.admin, cand.hash);
        chain::append_block(env.chain, cand, su, sa, env.uploader.public_point,
                            env.admin.public_point, authorized);
        persist::save_chain(env.chain, env.key, env.chain_path);
        double ms = detail::elapsed_ms_since(start);
        records.push_back({iter, label, "upload", ms, sample_vsz()});
        if (csv.is_open()) detail::write_record(csv, records.back());
        cids.push_back(std::move(cid));
      } catch (const std::exception& e) {
        throw Error("benchmark upload aborted at size " + label + " iteration " +
                    std::to_string(iter) + ": " + e.what());
      }
    }

    for (int iter = 1; iter <= config.iters; ++iter) {
      try {
        const store::ContentId& cid = cids[iter - 1];
        auto start = std::chrono::steady_clock::now();
        const chain::Block* found = nullptr;
        for (const auto& b : env.chain.blocks()) {
          if (b.cid == cid.text) {
            found = &b;
            break;
          }
        }
        if (!found) throw NotFoundError("cid not recorded on chain: " + cid.text);
        Bytes data = env.content.get(cid);
        double ms = detail::elapsed_ms_since(start);
        if (data.size() != size_from_label(label))
          throw IntegrityError("retrieved size mismatch");
        records.push_back({iter, label, "retrieve", ms, sample_vsz()});
        if (csv.is_open()) detail::write_record(csv, records.back());
      } catch (const std::exception& e) {
        throw Error("benchmark retrieve aborted at size " + label + " iteration " +
                    std::to_string(iter) + ": " + e.what());
      }
    }
  }
  return records;
}

}  // namespace destine::bench
