#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "destine/errors.hpp"
#include "destine/fsutil.hpp"

namespace destine {

// Operator configuration, loaded from a key = value file. '#' starts a
// comment; the `uploader` key may repeat to build the authorized list.
struct Config {
  std::string chain_path = "blockchain.json";
  std::string key_file;           // key.file — symmetric key (64 hex chars)
  std::string admin_key_file;     // key.admin_file — admin private scalar
  std::string uploader_key_file;  // key.uploader_file — uploader private scalar
  std::vector<std::string> uploaders;  // authorized uploader public keys (hex)
  std::string store_backend = "local";
  std::string store_root = "store";
  std::string ipfs_url = "http://127.0.0.1:5001";
  std::string serve_addr = "127.0.0.1:9180";
  std::int64_t ttl_ms = 60000;
};

inline Config parse_config(const std::string& text, const std::string& origin = "config") {
  Config cfg;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;

    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "chain.path") cfg.chain_path = value;
    else if (key == "key.file") cfg.key_file = value;
    else if (key == "key.admin_file") cfg.admin_key_file = value;
    else if (key == "key.uploader_file") cfg.uploader_key_file = value;
    else if (key == "uploader") cfg.uploaders.push_back(value);
    else if (key == "store.backend") cfg.store_backend = value;
    else if (key == "store.root") cfg.store_root = value;
    else if (key == "store.ipfs_url") cfg.ipfs_url = value;
    else if (key == "serve.addr") cfg.serve_addr = value;
    else if (key == "serve.ttl_ms") {
      try {
        cfg.ttl_ms = std::stoll(value);
      } catch (const std::exception&) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": serve.ttl_ms not a number");
      }
      if (cfg.ttl_ms <= 0)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": serve.ttl_ms must be > 0");
    } else {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  if (cfg.store_backend != "local" && cfg.store_backend != "ipfs")
    throw ConfigError(origin + ": store.backend must be 'local' or 'ipfs'");
  return cfg;
}

inline Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.string());
}

}  // namespace destine
