#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "destine/store/content_store.hpp"
#include "destine/store/ipfs_client.hpp"

#include "httplib.h"

using namespace destine;
using namespace destine::store;
namespace fs = std::filesystem;

namespace {

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

struct LocalStoreTest : ::testing::Test {
  fs::path root = fs::temp_directory_path() /
                  ("destine_store_test_" + std::to_string(::getpid()) + "_" +
                   std::to_string(counter++));
  LocalStore store{root};

  ~LocalStoreTest() override {
    std::error_code ec;
    fs::remove_all(root, ec);
  }

  static inline int counter = 0;
};

}  // namespace

TEST_F(LocalStoreTest, PutGetRoundTrip) {
  std::mt19937_64 rng(31);
  Bytes data = random_bytes(rng, 1024);
  ContentId id = store.put(data);
  EXPECT_EQ(store.get(id), data);
}

TEST_F(LocalStoreTest, PutIsDeterministic) {
  std::mt19937_64 rng(32);
  Bytes data = random_bytes(rng, 512);
  EXPECT_EQ(store.put(data), store.put(data));
}

// "abc" must map to the standard digest, prefixed.
TEST_F(LocalStoreTest, KnownAnswerId) {
  ContentId id = store.put(as_bytes("abc"));
  EXPECT_EQ(id.text,
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

// The four benchmark sizes round-trip byte-exactly.
TEST_F(LocalStoreTest, BenchmarkSizesRoundTrip) {
  std::mt19937_64 rng(33);
  for (std::size_t n : {1024u, 10240u, 102400u, 1048576u}) {
    Bytes data = random_bytes(rng, n);
    EXPECT_EQ(store.get(store.put(data)), data) << n;
  }
}

TEST_F(LocalStoreTest, UnknownIdNotFound) {
  ContentId unknown{"sha256:" + std::string(64, '0')};
  EXPECT_THROW(store.get(unknown), NotFoundError);
  EXPECT_FALSE(store.has(unknown));
  EXPECT_THROW(store.get(ContentId{"QmSomeRemoteCid"}), NotFoundError);
}

TEST_F(LocalStoreTest, CorruptBlobIsIntegrityError) {
  ContentId id = store.put(as_bytes("tamper target payload"));
  std::string hex = id.text.substr(7);
  fs::path blob = root / "objects" / hex.substr(0, 2) / hex;
  {
    std::fstream f(blob, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(3);
    f.put('X');
  }
  EXPECT_THROW(store.get(id), IntegrityError);
  EXPECT_FALSE(store.has(id));
}

TEST_F(LocalStoreTest, HasReflectsDeletion) {
  ContentId id = store.put(as_bytes("short lived"));
  EXPECT_TRUE(store.has(id));
  std::string hex = id.text.substr(7);
  fs::remove(root / "objects" / hex.substr(0, 2) / hex);
  EXPECT_FALSE(store.has(id));
}

TEST_F(LocalStoreTest, EmptyContentRejected) {
  EXPECT_THROW(store.put({}), std::invalid_argument);
}

// get . put is the identity across sizes from 1 byte to 2 MiB.
TEST_F(LocalStoreTest, PutGetIdentityProperty) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 16; ++trial) {
    // Log-uniform sizes over [1, 2 MiB].
    double exponent = std::uniform_real_distribution<double>(0.0, 21.0)(rng);
    std::size_t n = static_cast<std::size_t>(std::pow(2.0, exponent));
    n = std::max<std::size_t>(1, std::min<std::size_t>(n, 2u << 20));
    Bytes data = random_bytes(rng, n);
    EXPECT_EQ(store.get(store.put(data)), data) << "size " << n;
  }
}

namespace {

// In-process stand-in for the daemon's RPC surface.
class FakeIpfsDaemon {
 public:
  FakeIpfsDaemon() {
    server_.Post("/api/v0/add", [this](const httplib::Request& req, httplib::Response& res) {
      ASSERT_TRUE(req.is_multipart_form_data());
      auto file = req.get_file_value("file");
      std::string cid = "Qm" + destine::to_hex(destine::crypto::sha256(
                                   destine::as_bytes(file.content)))
                                   .substr(0, 20);
      blobs_[cid] = file.content;
      res.set_content("{\"Name\":\"blob\",\"Hash\":\"" + cid + "\",\"Size\":\"" +
                          std::to_string(file.content.size()) + "\"}\n",
                      "application/json");
    });
    server_.Post("/api/v0/cat", [this](const httplib::Request& req, httplib::Response& res) {
      auto it = blobs_.find(req.get_param_value("arg"));
      if (it == blobs_.end()) {
        res.status = 500;
        res.set_content("{\"Message\":\"not found\"}", "application/json");
        return;
      }
      res.set_content(it->second, "application/octet-stream");
    });
    server_.Post("/api/v0/block/stat",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   if (!blobs_.count(req.get_param_value("arg"))) res.status = 500;
                 });
    server_.Post("/api/v0/version", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"Version\":\"fake\"}", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeIpfsDaemon() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::map<std::string, std::string> blobs_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(IpfsStore, PutGetHasAgainstDaemon) {
  FakeIpfsDaemon daemon;
  IpfsStore store(daemon.url());
  EXPECT_TRUE(store.reachable());

  std::mt19937_64 rng(35);
  Bytes data = random_bytes(rng, 2048);
  ContentId id = store.put(data);
  EXPECT_FALSE(id.text.empty());
  EXPECT_EQ(store.get(id), data);
  EXPECT_TRUE(store.has(id));
  EXPECT_FALSE(store.has(ContentId{"QmUnknown"}));
  EXPECT_THROW(store.get(ContentId{"QmUnknown"}), NotFoundError);
}

// Unreachable daemon surfaces as a transport error naming the endpoint.
TEST(IpfsStore, UnreachableDaemonIsTransportError) {
  IpfsStore store("http://127.0.0.1:1");  // nothing listens on port 1
  try {
    store.put(as_bytes("x"));
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_NE(std::string(e.what()).find("127.0.0.1:1"), std::string::npos);
  }
  EXPECT_FALSE(store.reachable());
}
