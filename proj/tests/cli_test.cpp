#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/stat.h>
#include <sys/wait.h>

#include "json.hpp"

#include "destine/fsutil.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

struct CliTest : ::testing::Test {
  fs::path dir = fs::temp_directory_path() /
                 ("destine_cli_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++));

  void SetUp() override {
    fs::create_directories(dir);
    fs::current_path(dir);
  }

  void TearDown() override {
    fs::current_path(fs::temp_directory_path());
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  RunResult run(const std::string& args) {
    fs::path out = dir / "cmd.out";
    std::string cmd = std::string(DESTINE_CLI_PATH) + " " + args + " > " + out.string() +
                      " 2>&1";
    int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    result.output.assign((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    return result;
  }

  void provision() {
    ASSERT_EQ(run("keygen --role admin --out admin.key").exit_code, 0);
    ASSERT_EQ(run("keygen --role uploader --out uploader.key").exit_code, 0);
    std::ofstream(dir / "chain.key") << std::string(64, '5') << "\n";
    std::ofstream(dir / "destine.conf") << "chain.path = chain.enc\n"
                                           "key.file = chain.key\n"
                                           "key.admin_file = admin.key\n"
                                           "key.uploader_file = uploader.key\n"
                                           "store.root = store\n";
  }

  static inline int counter = 0;
};

nlohmann::json parse_json(const std::string& text) {
  // Command output may carry a leading info line; find the first brace.
  std::size_t brace = text.find('{');
  return nlohmann::json::parse(text.substr(brace));
}

}  // namespace

TEST_F(CliTest, KeygenWritesRestrictedFiles) {
  auto r = run("keygen --role admin --out a.key");
  EXPECT_EQ(r.exit_code, 0);
  struct stat st{};
  ASSERT_EQ(::stat((dir / "a.key").c_str(), &st), 0);
  EXPECT_EQ(st.st_mode & 0777, 0600u);

  std::ifstream pub(dir / "a.key.pub");
  std::string hex;
  pub >> hex;
  EXPECT_EQ(hex.size(), 130u);
  EXPECT_EQ(hex.substr(0, 2), "04");

  // Refuses to clobber without --force; new key differs after --force.
  EXPECT_EQ(run("keygen --role admin --out a.key").exit_code, 2);
  EXPECT_EQ(run("keygen --role admin --out a.key --force").exit_code, 0);
  std::ifstream pub2(dir / "a.key.pub");
  std::string hex2;
  pub2 >> hex2;
  EXPECT_NE(hex2, hex);
}

TEST_F(CliTest, LifecycleInitUploadVerifyGet) {
  provision();
  EXPECT_EQ(run("--config destine.conf init").exit_code, 0);
  EXPECT_EQ(run("--config destine.conf verify").exit_code, 0);

  // Re-init refused without --force.
  EXPECT_EQ(run("--config destine.conf init").exit_code, 2);
  EXPECT_EQ(run("--config destine.conf init --force").exit_code, 0);

  std::ofstream(dir / "sample.bin") << "sample payload for the cli test";
  auto up = run("--config destine.conf upload sample.bin");
  ASSERT_EQ(up.exit_code, 0) << up.output;
  auto block = parse_json(up.output);
  EXPECT_EQ(block["index"], 1);
  std::string cid = block["cid"];

  // Re-uploading identical bytes: new block, same content id.
  auto up2 = run("--config destine.conf upload sample.bin");
  ASSERT_EQ(up2.exit_code, 0);
  auto block2 = parse_json(up2.output);
  EXPECT_EQ(block2["index"], 2);
  EXPECT_EQ(block2["cid"], cid);

  auto got = run("--config destine.conf get --cid " + cid + " --out fetched.bin");
  EXPECT_EQ(got.exit_code, 0) << got.output;
  EXPECT_EQ(destine::read_file(dir / "fetched.bin"),
            destine::read_file(dir / "sample.bin"));

  auto genesis = run("--config destine.conf get --index 0 --out nothing.bin");
  EXPECT_EQ(genesis.exit_code, 2);
  EXPECT_NE(genesis.output.find("genesis has no content"), std::string::npos);

  EXPECT_EQ(run("--config destine.conf verify").exit_code, 0);
}

TEST_F(CliTest, TamperedContainerFailsVerification) {
  provision();
  ASSERT_EQ(run("--config destine.conf init").exit_code, 0);

  destine::Bytes container = destine::read_file(dir / "chain.enc");
  container[container.size() / 2] ^= 0x01;
  std::ofstream(dir / "chain.enc", std::ios::binary | std::ios::trunc)
      .write(reinterpret_cast<const char*>(container.data()),
             static_cast<std::streamsize>(container.size()));

  auto r = run("--config destine.conf verify");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("authentication"), std::string::npos);
}

TEST_F(CliTest, MissingConfigIsUsageError) {
  EXPECT_EQ(run("--config nope.conf verify").exit_code, 2);
  EXPECT_EQ(run("get").exit_code, 2);          // get needs a config
  EXPECT_EQ(run("nonsense").exit_code, 2);     // unknown subcommand
  EXPECT_EQ(run("--help").exit_code, 0);
}

TEST_F(CliTest, BenchAndAnalyzePipeline) {
  auto bench = run("bench --sizes 1k --iters 45 --seed 2 --out bench.csv");
  ASSERT_EQ(bench.exit_code, 0) << bench.output;

  std::ifstream csv(dir / "bench.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "iteration,size,op,elapsed_ms,vsz_mb");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 90);

  auto analyze = run("analyze --in bench.csv --out summary.csv --seed 2");
  ASSERT_EQ(analyze.exit_code, 0) << analyze.output;
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary_curves.csv"));
  EXPECT_NE(analyze.output.find("| Variable |"), std::string::npos);

  std::ifstream summary(dir / "summary.csv");
  rows = 0;
  while (std::getline(summary, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 1 + 4);  // header + (upload,retrieve) x (elapsed,vsz)

  EXPECT_EQ(run("bench --sizes 9k --iters 2 --out x.csv").exit_code, 2);
  EXPECT_EQ(run("analyze --in missing.csv").exit_code, 3);
}

// Serve refuses to start while another process holds the chain lock.
TEST_F(CliTest, ServeRespectsExclusiveLock) {
  provision();
  ASSERT_EQ(run("--config destine.conf init").exit_code, 0);
  std::ofstream(dir / "chain.enc.lock") << "12345\n";
  auto r = run("--config destine.conf serve --addr 127.0.0.1:0");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("lock"), std::string::npos);
}
