// destine: operator CLI for the DESTinE Block storage framework.
//
// Exit codes (stable contract): 0 success, 1 verification/authentication
// failure, 2 usage/config error, 3 other operational failure.

#include <atomic>
#include <csignal>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sys/stat.h>
#include <unistd.h>

#include "CLI11.hpp"

#include "destine/api/service.hpp"
#include "destine/bench/harness.hpp"
#include "destine/config.hpp"
#include "destine/gmm/summarize.hpp"
#include "destine/persist/container.hpp"
#include "destine/store/ipfs_client.hpp"

namespace fs = std::filesystem;
using namespace destine;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailure = 1;
constexpr int kUsageError = 2;
constexpr int kOperationalError = 3;

crypto::KeyPair load_keypair(const std::string& path, crypto::Role role) {
  if (path.empty())
    throw ConfigError(std::string("no ") + crypto::role_name(role) +
                      " key file configured");
  struct stat st{};
  if (::stat(path.c_str(), &st) == 0 && (st.st_mode & 077) != 0)
    std::cerr << "warning: " << path << " is readable by other users; chmod 600 it\n";

  std::string hex;
  try {
    hex = trim(read_text_file(path));
  } catch (const StorageError& e) {
    throw ConfigError(std::string("cannot read key file: ") + e.what());
  }
  Bytes raw;
  try {
    raw = from_hex(hex);
  } catch (const std::invalid_argument&) {
    throw ConfigError("private key file is not valid hex: " + path);
  }
  if (raw.size() != 32) throw ConfigError("private key must be 64 hex chars: " + path);
  std::array<std::uint8_t, 32> scalar{};
  std::copy(raw.begin(), raw.end(), scalar.begin());
  return crypto::keypair_from_private(role, scalar);
}

void write_private_file(const fs::path& path, const std::string& content, bool force) {
  if (fs::exists(path) && !force)
    throw ConfigError(path.string() + " already exists (use --force to overwrite)");
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  if (fd < 0) throw StorageError("cannot create " + path.string());
  ssize_t n = ::write(fd, content.data(), content.size());
  ::close(fd);
  if (n != static_cast<ssize_t>(content.size()))
    throw StorageError("short write to " + path.string());
}

std::unique_ptr<store::ContentStore> make_store(const Config& cfg) {
  if (cfg.store_backend == "ipfs")
    return std::make_unique<store::IpfsStore>(cfg.ipfs_url);
  return std::make_unique<store::LocalStore>(cfg.store_root);
}

std::vector<crypto::PublicKey> authorized_uploaders(const Config& cfg) {
  std::vector<crypto::PublicKey> keys;
  for (const auto& hex : cfg.uploaders) {
    try {
      keys.push_back(crypto::PublicKey::from_hex(hex));
    } catch (const std::exception&) {
      throw ConfigError("bad uploader public key in config: " + hex);
    }
  }
  return keys;
}

// Serve mode holds <chain.path>.lock exclusively so a second writer cannot
// start against the same chain file.
class LockFile {
 public:
  explicit LockFile(fs::path path) : path_(std::move(path)) {
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
      throw ConfigError("lock file " + path_.string() +
                        " exists; another serve process owns this chain");
    std::string pid = std::to_string(::getpid()) + "\n";
    (void)!::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  ~LockFile() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  LockFile(const LockFile&) = delete;

 private:
  fs::path path_;
};

std::atomic<api::Service*> g_service{nullptr};
std::atomic<bool> g_stop{false};

void handle_signal(int) {
  g_stop = true;
  if (auto* s = g_service.load()) s->stop();
}

std::pair<std::string, int> parse_addr(const std::string& addr) {
  std::size_t colon = addr.rfind(':');
  if (colon == std::string::npos)
    throw ConfigError("serve address must be host:port, got " + addr);
  try {
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("bad port in serve address " + addr);
  }
}

// ------------------------------------------------------------- subcommands

int cmd_keygen(const std::string& role_name, const std::string& out, bool force) {
  crypto::Role role =
      role_name == "admin" ? crypto::Role::admin : crypto::Role::uploader;
  crypto::KeyPair kp = crypto::generate_keypair(role);
  write_private_file(out, to_hex(kp.private_scalar) + "\n", force);
  fs::path pub_path = out + ".pub";
  if (fs::exists(pub_path) && !force)
    throw ConfigError(pub_path.string() + " already exists (use --force to overwrite)");
  std::ofstream(pub_path, std::ios::trunc) << kp.public_point.to_hex() << "\n";
  std::cout << "wrote " << out << " (private, 0600) and " << pub_path.string()
            << " (public)\n";
  return kOk;
}

int cmd_init(const Config& cfg, bool force) {
  if (fs::exists(cfg.chain_path) && !force)
    throw ConfigError("chain file " + cfg.chain_path +
                      " already exists (use --force to reinitialize)");
  crypto::KeyPair admin = load_keypair(cfg.admin_key_file, crypto::Role::admin);
  crypto::KeyPair uploader = load_keypair(cfg.uploader_key_file, crypto::Role::uploader);
  crypto::SymmetricKey key = persist::load_symmetric_key(cfg.key_file);

  chain::Chain c(chain::create_genesis(admin, uploader, now_ms()));
  persist::save_chain(c, key, cfg.chain_path);
  std::cout << "initialized chain at " << cfg.chain_path << "\n"
            << chain::block_to_json(c.at(0)).dump(2) << "\n";
  return kOk;
}

int cmd_upload(const Config& cfg, const std::string& file) {
  crypto::KeyPair admin = load_keypair(cfg.admin_key_file, crypto::Role::admin);
  crypto::KeyPair uploader = load_keypair(cfg.uploader_key_file, crypto::Role::uploader);
  crypto::SymmetricKey key = persist::load_symmetric_key(cfg.key_file);
  auto content = make_store(cfg);

  Bytes data = read_file(file);
  chain::Chain c = persist::load_chain(cfg.chain_path, key);

  store::ContentId cid = content->put(data);
  chain::Candidate cand = chain::build_candidate(c, cid, now_ms());
  crypto::Signature su = crypto::ecdsa_sign(uploader, cand.hash);
  crypto::Signature sa = crypto::ecdsa_sign(admin, cand.hash);

  std::vector<crypto::PublicKey> authorized = authorized_uploaders(cfg);
  authorized.push_back(uploader.public_point);
  chain::append_block(c, cand, su, sa, uploader.public_point, admin.public_point,
                      authorized);
  persist::save_chain(c, key, cfg.chain_path);
  std::cout << chain::block_to_json(c.tip()).dump(2) << "\n";
  return kOk;
}

int cmd_get(const Config& cfg, const std::string& cid_text, std::int64_t index,
            const std::string& out) {
  crypto::SymmetricKey key = persist::load_symmetric_key(cfg.key_file);
  chain::Chain c = persist::load_chain(cfg.chain_path, key);

  const chain::Block* block = nullptr;
  if (index >= 0) {
    if (static_cast<std::size_t>(index) >= c.size())
      throw ConfigError("no block at index " + std::to_string(index));
    block = &c.at(static_cast<std::size_t>(index));
    if (block->cid.empty()) throw ConfigError("genesis has no content");
  } else {
    for (const auto& b : c.blocks()) {
      if (b.cid == cid_text) {
        block = &b;
        break;
      }
    }
    if (!block) throw NotFoundError("cid not recorded on chain: " + cid_text);
  }

  auto content = make_store(cfg);
  Bytes data = content->get(store::ContentId{block->cid});
  if (out == "-") {
    std::cout.write(reinterpret_cast<const char*>(data.data()),
                    static_cast<std::streamsize>(data.size()));
  } else {
    write_file_atomic(out, data);
    std::cerr << "wrote " << data.size() << " bytes from block " << block->index
              << " to " << out << "\n";
  }
  return kOk;
}

int cmd_verify(const Config& cfg) {
  crypto::SymmetricKey key = persist::load_symmetric_key(cfg.key_file);
  chain::Chain c = persist::load_chain(cfg.chain_path, key);  // verifies fully
  std::cout << nlohmann::json{{"ok", true}, {"blocks", c.size()}}.dump() << "\n";
  return kOk;
}

int cmd_serve(const Config& cfg, const std::string& addr_override) {
  crypto::KeyPair admin = load_keypair(cfg.admin_key_file, crypto::Role::admin);
  crypto::SymmetricKey key = persist::load_symmetric_key(cfg.key_file);
  auto content = make_store(cfg);
  std::vector<crypto::PublicKey> authorized = authorized_uploaders(cfg);
  if (!cfg.uploader_key_file.empty() && fs::exists(cfg.uploader_key_file))
    authorized.push_back(
        load_keypair(cfg.uploader_key_file, crypto::Role::uploader).public_point);
  if (authorized.empty())
    throw ConfigError("no authorized uploaders configured (add uploader = <hex> lines)");

  chain::Chain c = persist::load_chain(cfg.chain_path, key);

  LockFile lock(cfg.chain_path + ".lock");
  auto [host, port] = parse_addr(addr_override.empty() ? cfg.serve_addr : addr_override);

  api::ServiceOptions options;
  options.ttl_ms = cfg.ttl_ms;
  api::Service service(std::move(c), admin, authorized, *content, key, cfg.chain_path,
                       options);
  int actual = service.bind(host, port);
  g_service = &service;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cout << "listening on " << host << ":" << actual << std::endl;
  service.serve_blocking();
  g_service = nullptr;
  return kOk;
}

int cmd_bench(const Config& cfg, std::string sizes_csv, int iters, std::uint64_t seed,
              const std::string& out, const std::string& backend,
              std::string workdir) {
  std::vector<std::string> sizes;
  std::size_t start = 0;
  while (start <= sizes_csv.size()) {
    std::size_t comma = sizes_csv.find(',', start);
    if (comma == std::string::npos) comma = sizes_csv.size();
    std::string label = trim(sizes_csv.substr(start, comma - start));
    if (!label.empty()) sizes.push_back(label);
    start = comma + 1;
  }
  if (sizes.empty()) throw ConfigError("no sizes given");
  for (const auto& s : sizes) bench::size_from_label(s);  // validate early

  bool ephemeral = workdir.empty();
  if (ephemeral)
    workdir = (fs::temp_directory_path() /
               ("destine_bench_" + std::to_string(::getpid())))
                  .string();
  fs::create_directories(workdir);

  std::unique_ptr<store::ContentStore> content;
  if (backend == "ipfs") {
    content = std::make_unique<store::IpfsStore>(cfg.ipfs_url);
  } else if (backend == "local") {
    content = std::make_unique<store::LocalStore>(fs::path(workdir) / "store");
  } else {
    throw ConfigError("backend must be local or ipfs");
  }

  bench::BenchEnv env = bench::make_bench_env(*content, fs::path(workdir) / "chain.bin");
  bench::BenchConfig config;
  config.sizes = sizes;
  config.iters = iters;
  config.seed = seed;
  config.out_csv = out;

  std::cerr << "running " << sizes.size() << " size(s) x " << iters
            << " iterations on the " << backend << " backend\n";
  auto records = bench::run_benchmark(env, config);

  chain::VerifyReport report = chain::verify_chain(env.chain);
  if (!report.ok)
    throw IntegrityError("post-benchmark chain verification failed at block " +
                             std::to_string(report.first_bad_index) + ": " + report.reason,
                         report.first_bad_index);

  for (const auto& label : sizes) {
    double up = 0, down = 0;
    int nu = 0, nd = 0;
    for (const auto& r : records) {
      if (r.size_label != label) continue;
      if (r.op == "upload") { up += r.elapsed_ms; ++nu; }
      else { down += r.elapsed_ms; ++nd; }
    }
    std::fprintf(stderr, "%-5s mean upload %8.3f ms   mean retrieve %8.3f ms\n",
                 label.c_str(), up / std::max(nu, 1), down / std::max(nd, 1));
  }
  std::cerr << "chain length " << env.chain.size() << ", verification ok\n"
            << "wrote " << records.size() << " records to " << out << "\n";

  if (ephemeral) {
    std::error_code ec;
    fs::remove_all(workdir, ec);
  }
  return kOk;
}

int cmd_analyze(const std::string& in, const std::string& out, std::string curves,
                int max_k, std::uint64_t seed) {
  gmm::SummaryResult result = gmm::summarize(in, max_k, seed);
  for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
  gmm::write_summary_csv(result, out);
  if (curves.empty()) {
    fs::path p(out);
    curves = (p.parent_path() / (p.stem().string() + "_curves.csv")).string();
  }
  gmm::write_curves_csv(result, curves);
  std::cout << gmm::summary_markdown(result);
  std::cerr << "wrote " << out << " and " << curves << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DESTinE Block: PoA dual-signature content ledger"};
  app.require_subcommand(1);

  std::string config_path = "destine.conf";
  app.add_option("--config", config_path, "config file (key = value lines)");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "generate an ECDSA P-256 keypair");
  std::string role, keyout;
  bool keygen_force = false;
  keygen->add_option("--role", role, "admin or uploader")
      ->required()
      ->check(CLI::IsMember({"admin", "uploader"}));
  keygen->add_option("--out", keyout, "private key path; .pub is written alongside")
      ->required();
  keygen->add_flag("--force", keygen_force, "overwrite existing files");

  // init
  auto* init = app.add_subcommand("init", "create the genesis block and encrypted chain");
  bool init_force = false;
  init->add_flag("--force", init_force, "replace an existing chain file");

  // upload
  auto* upload = app.add_subcommand("upload", "single-shot upload with local keys");
  std::string upload_file;
  upload->add_option("file", upload_file, "file to store")->required();

  // get
  auto* get = app.add_subcommand("get", "fetch stored content by cid or block index");
  std::string get_cid, get_out = "-";
  std::int64_t get_index = -1;
  auto* cid_opt = get->add_option("--cid", get_cid, "content id");
  get->add_option("--index", get_index, "block index")->excludes(cid_opt);
  get->add_option("--out", get_out, "output path, or - for stdout");

  // verify
  app.add_subcommand("verify", "load, authenticate and verify the chain");

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP upload/retrieval service");
  std::string serve_addr;
  serve->add_option("--addr", serve_addr, "host:port (overrides serve.addr)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the measurement protocol");
  std::string bench_sizes = "1k,10k,100k,1m", bench_out = "bench.csv",
              bench_backend = "local", bench_workdir;
  int bench_iters = 1000;
  std::uint64_t bench_seed = 1;
  bench_cmd->add_option("--sizes", bench_sizes, "comma list from {1k,10k,100k,1m}");
  bench_cmd->add_option("--iters", bench_iters, "uploads (and retrievals) per size");
  bench_cmd->add_option("--seed", bench_seed, "payload generator seed");
  bench_cmd->add_option("--out", bench_out, "output CSV path");
  bench_cmd->add_option("--backend", bench_backend, "local or ipfs");
  bench_cmd->add_option("--workdir", bench_workdir,
                        "scratch dir for chain+store (default: temp, removed)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "fit mixtures to a benchmark CSV");
  std::string an_in, an_out = "gmm_summary.csv", an_curves;
  int an_max_k = 4;
  std::uint64_t an_seed = 0;
  analyze->add_option("--in", an_in, "benchmark CSV")->required();
  analyze->add_option("--out", an_out, "summary CSV path");
  analyze->add_option("--curves", an_curves, "density curves CSV path");
  analyze->add_option("--max-k", an_max_k, "largest component count tried");
  analyze->add_option("--seed", an_seed, "fitting seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    auto config = [&]() -> Config {
      if (!fs::exists(config_path)) {
        // bench/analyze/keygen can run configless; everything else cannot.
        if (app.got_subcommand("init") || app.got_subcommand("upload") ||
            app.got_subcommand("get") || app.got_subcommand("verify") ||
            app.got_subcommand("serve"))
          throw ConfigError("config file not found: " + config_path);
        return Config{};
      }
      return load_config(config_path);
    }();

    if (app.got_subcommand("keygen")) return cmd_keygen(role, keyout, keygen_force);
    if (app.got_subcommand("init")) return cmd_init(config, init_force);
    if (app.got_subcommand("upload")) return cmd_upload(config, upload_file);
    if (app.got_subcommand("get")) {
      if (get_cid.empty() && get_index < 0)
        throw ConfigError("get needs --cid or --index");
      return cmd_get(config, get_cid, get_index, get_out);
    }
    if (app.got_subcommand("verify")) return cmd_verify(config);
    if (app.got_subcommand("serve")) return cmd_serve(config, serve_addr);
    if (app.got_subcommand("bench"))
      return cmd_bench(config, bench_sizes, bench_iters, bench_seed, bench_out,
                       bench_backend, bench_workdir);
    if (app.got_subcommand("analyze"))
      return cmd_analyze(an_in, an_out, an_curves, an_max_k, an_seed);
    return kUsageError;
  } catch (const AuthenticationError& e) {
    std::cerr << "authentication failure: " << e.what() << "\n";
    return kVerifyFailure;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity failure: " << e.what() << "\n";
    return kVerifyFailure;
  } catch (const SignatureRejectedError& e) {
    std::cerr << "signature rejected (" << e.role << "): " << e.what() << "\n";
    return kVerifyFailure;
  } catch (const AuthorizationError& e) {
    std::cerr << "authorization failure: " << e.what() << "\n";
    return kVerifyFailure;
  } catch (const CorruptionError& e) {
    std::cerr << "corruption: " << e.what() << "\n";
    return kVerifyFailure;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kVerifyFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOperationalError;
  }
}
