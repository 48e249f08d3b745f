// asf <command> --config <path> [--q 3,5,7] [--budget L] [--out dir] [--jobs N]
// Writes <out>/<command>.json (and .csv for tabular commands), prints the
// check summary and exits 0 only when every check passes; 2 on errors.
// With ASF_CACHE_DIR set, results are stored under the SHA-256 of the
// canonical config and the library version.
#include <openssl/evp.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asf/asf.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Session {
  asf_session* s = nullptr;
  Session() { asf_session_create(&s); }
  ~Session() { asf_session_destroy(s); }
};

std::string take(char* p) {
  std::string s = p ? p : "";
  asf_free_string(p);
  return s;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
  // write then rename, so a concurrent reader never sees a partial file
  fs::path tmp = p;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, p);
}

std::string sha256_hex(const std::string& s) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  EVP_Digest(s.data(), s.size(), md, &n, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

int error_exit(const Session& s, int status) {
  std::cerr << "error (" << asf_status_name(status) << "): " << asf_last_error(s.s) << std::endl;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"affine Springer fiber experiments"};
  std::string command, config_path, out_dir = ".";
  std::vector<int> qs;
  int budget = -1, jobs = 0;
  app.add_option("command", command, "count | dim | components | germs | nilint | steinberg | verify | main")
      ->required()
      ->check(CLI::IsMember({"count", "dim", "components", "germs", "nilint", "steinberg", "verify", "main"}));
  app.add_option("--config", config_path, "JSON experiment config (optional for verify)")->check(CLI::ExistingFile);
  app.add_option("--q", qs, "field sizes, overriding the config")->delimiter(',');
  app.add_option("--budget", budget, "fixed cell budget L (0: raise until stable)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "artifact directory");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.set_version_flag("--version", std::string(ASF_VERSION));
  CLI11_PARSE(app, argc, argv);

  ordered_json config = ordered_json::object();
  try {
    if (!config_path.empty()) config = ordered_json::parse(read_file(config_path));
    else if (command != "verify") throw std::runtime_error("--config is required for " + command);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  if (!qs.empty()) config["q"] = qs;
  if (budget >= 0) config["budget"] = budget;
  if (jobs > 0) config["jobs"] = jobs;
  std::string text = config.dump();

  Session s;
  char* raw = nullptr;
  int st = asf_canonical_config(s.s, command.c_str(), text.c_str(), &raw);
  if (st != ASF_OK) return error_exit(s, st);
  std::string key = sha256_hex(take(raw) + "\n" + asf_version());

  std::string envelope;
  fs::path cached;
  if (const char* dir = std::getenv("ASF_CACHE_DIR"); dir && *dir) {
    cached = fs::path(dir) / (key + ".json");
    if (fs::exists(cached)) {
      envelope = read_file(cached);
      std::cerr << "cache hit " << key.substr(0, 16) << std::endl;
    }
  }
  if (envelope.empty()) {
    st = asf_run(s.s, command.c_str(), text.c_str(), &raw);
    if (st != ASF_OK) return error_exit(s, st);
    envelope = take(raw);
    if (!cached.empty()) {
      fs::create_directories(cached.parent_path());
      write_file(cached, envelope);
    }
  }

  auto env = ordered_json::parse(envelope);
  try {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / (command + ".json"), env["artifact"].dump(2) + "\n");
    std::string csv = env["csv"].get<std::string>();
    if (!csv.empty()) write_file(fs::path(out_dir) / (command + ".csv"), csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  for (const auto& line : env["summary"]) std::cout << line.get<std::string>() << "\n";
  return asf_result_pass(envelope.c_str()) ? 0 : 1;
}
