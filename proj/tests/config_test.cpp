#include <gtest/gtest.h>

#include "destine/config.hpp"

using namespace destine;

TEST(Config, ParsesAllKeys) {
  Config cfg = parse_config(
      "# operator config\n"
      "chain.path = /data/blockchain.json\n"
      "key.file = /data/chain.key   # symmetric key\n"
      "key.admin_file = /keys/admin\n"
      "key.uploader_file = /keys/uploader\n"
      "uploader = 04aa\n"
      "uploader = 04bb\n"
      "store.backend = ipfs\n"
      "store.root = /data/store\n"
      "store.ipfs_url = http://10.0.0.2:5001\n"
      "serve.addr = 0.0.0.0:9999\n"
      "serve.ttl_ms = 30000\n");
  EXPECT_EQ(cfg.chain_path, "/data/blockchain.json");
  EXPECT_EQ(cfg.key_file, "/data/chain.key");
  EXPECT_EQ(cfg.admin_key_file, "/keys/admin");
  EXPECT_EQ(cfg.uploader_key_file, "/keys/uploader");
  ASSERT_EQ(cfg.uploaders.size(), 2u);
  EXPECT_EQ(cfg.uploaders[1], "04bb");
  EXPECT_EQ(cfg.store_backend, "ipfs");
  EXPECT_EQ(cfg.store_root, "/data/store");
  EXPECT_EQ(cfg.ipfs_url, "http://10.0.0.2:5001");
  EXPECT_EQ(cfg.serve_addr, "0.0.0.0:9999");
  EXPECT_EQ(cfg.ttl_ms, 30000);
}

TEST(Config, Defaults) {
  Config cfg = parse_config("");
  EXPECT_EQ(cfg.store_backend, "local");
  EXPECT_EQ(cfg.ttl_ms, 60000);
  EXPECT_EQ(cfg.chain_path, "blockchain.json");
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("store.backend = s3\n"), ConfigError);
  EXPECT_THROW(parse_config("serve.ttl_ms = soon\n"), ConfigError);
  EXPECT_THROW(parse_config("serve.ttl_ms = -5\n"), ConfigError);
  EXPECT_THROW(parse_config("mystery.key = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("not a key value line\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/destine.conf"), ConfigError);
}

TEST(Config, CommentsAndBlanks) {
  Config cfg = parse_config("\n\n# comment only\n   \nchain.path = x\n");
  EXPECT_EQ(cfg.chain_path, "x");
}
