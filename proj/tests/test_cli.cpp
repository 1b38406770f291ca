// Exercises the CLI binary end to end: exit codes, file outputs, verdicts and
// the determinism contract. The binary path arrives as argv[1].

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tplearn/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_binary;

int run(const std::string& args) {
  const std::string cmd = g_binary + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("tplearn_cli_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_config(const fs::path& path, const nlohmann::json& extra) {
  nlohmann::json cfg = extra;
  std::ofstream out(path);
  out << cfg.dump(2);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("invalid preset exits with the config error code") {
  TempDir dir("badcfg");
  write_config(dir.path / "cfg.json", {{"robot", "hexapod"}});
  CHECK(run("demo --config " + (dir.path / "cfg.json").string()) == 2);
}

TEST_CASE("missing subcommand fails argument parsing") {
  CHECK(run("") != 0);
}

TEST_CASE("demo then train then synth, with byte-identical retraining") {
  TempDir dir("pipeline");
  const std::string out = (dir.path / "out").string();
  write_config(dir.path / "cfg.json",
               {{"robot", "bimanual5"}, {"kind", "priority"}, {"side", "left"},
                {"horizon", 8.0}, {"sweep", {2.0, 6.0}}, {"out", out}});
  const std::string cfg = " --config " + (dir.path / "cfg.json").string();

  CHECK(run("demo" + cfg) == 0);
  CHECK(fs::exists(out + "/demo_left_000.csv"));

  CHECK(run("train" + cfg) == 0);
  CHECK(fs::exists(out + "/model.json"));
  const std::string first = slurp(out + "/model.json");

  CHECK(run("train" + cfg) == 0);
  CHECK(slurp(out + "/model.json") == first);

  CHECK(run("synth" + cfg) == 0);
  CHECK(fs::exists(out + "/trajectory.csv"));
  const tpl::CsvTable table = tpl::read_csv(out + "/trajectory.csv");
  CHECK(table.column("t") == 0);
  CHECK(table.column("err_0") >= 0);
  CHECK(table.data.rows() > 100);
}

TEST_CASE("transitions suite emits verdict, csv and svg") {
  TempDir dir("transitions");
  const std::string out = (dir.path / "out").string();
  write_config(dir.path / "cfg.json", {{"robot", "planar3"}, {"out", out}});
  CHECK(run("exp transitions --config " + (dir.path / "cfg.json").string()) == 0);
  CHECK(fs::exists(out + "/transitions_errors.csv"));
  CHECK(fs::exists(out + "/transitions_errors.svg"));
  const nlohmann::json verdict = tpl::read_json(out + "/verdict_transitions.json");
  CHECK(verdict.at("pass").get<bool>());
  CHECK(verdict.at("criteria").size() == 3);
}

int main(int argc, char** argv) {
  if (argc > 1) g_binary = argv[1];
  doctest::Context context;
  context.applyCommandLine(1, argv);
  return context.run();
}
