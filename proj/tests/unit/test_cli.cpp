// End-to-end checks of the installed binary via subprocesses.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "bestofn_cli_log.txt";
  const std::string command =
      std::string(BESTOFN_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(command.c_str());
  std::ifstream in(log);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return {WEXITSTATUS(raw), buffer.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bestofn_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate run produces the expected files") {
    const auto dir = fresh_dir("simulate");
    write_file(dir / "spec.json", R"({
      "command": "simulate",
      "instance": {"n": 2, "quality": [1, 1], "cost": [1, 1], "interaction": "na"},
      "N": 16, "repetitions": 10, "seed": 3
    })");
    const auto result = run_cli("--spec " + (dir / "spec.json").string() + " --out " +
                                (dir / "out").string());
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(dir / "out" / "runs.csv"));
    CHECK(fs::exists(dir / "out" / "summary.json"));
  }

  TEST_CASE("seed and repetitions flags override the spec") {
    const auto dir = fresh_dir("overrides");
    write_file(dir / "spec.json", R"({
      "command": "simulate",
      "instance": {"n": 2, "quality": [1, 1], "cost": [1, 1], "interaction": "na"},
      "N": 16, "repetitions": 10, "seed": 3
    })");
    const std::string spec = (dir / "spec.json").string();
    CHECK(run_cli("--spec " + spec + " --out " + (dir / "a").string() +
                  " --seed 11 --repetitions 4 --quiet")
              .exit_code == 0);
    const auto runs = slurp(dir / "a" / "runs.csv");
    CHECK(runs.find("\n11,") != std::string::npos);  // first run seeded 11
    // header + 4 runs
    CHECK(std::count(runs.begin(), runs.end(), '\n') == 5);
  }

  TEST_CASE("identical invocations produce identical bytes") {
    const auto dir = fresh_dir("repro");
    write_file(dir / "spec.json", R"({
      "command": "ssa",
      "instance": {"n": 2, "quality": [1.0, 0.5], "cost": [1, 1], "interaction": "na"},
      "N": 20, "repetitions": 8, "seed": 5
    })");
    const std::string spec = (dir / "spec.json").string();
    CHECK(run_cli("--spec " + spec + " --out " + (dir / "a").string() + " --quiet")
              .exit_code == 0);
    CHECK(run_cli("--spec " + spec + " --out " + (dir / "b").string() + " --quiet")
              .exit_code == 0);
    CHECK(slurp(dir / "a" / "runs.csv") == slurp(dir / "b" / "runs.csv"));
    CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
  }

  TEST_CASE("positional command overrides the spec file") {
    const auto dir = fresh_dir("positional");
    write_file(dir / "spec.json", R"({
      "instance": {"n": 2, "quality": [1.0, 0.5], "cost": [1, 1], "interaction": "na"},
      "horizon": 2.0, "dt": 0.5
    })");
    const auto result = run_cli("meanfield --spec " + (dir / "spec.json").string() +
                                " --out " + (dir / "out").string() + " --quiet");
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(dir / "out" / "trajectory.csv"));
  }

  TEST_CASE("state space guard surfaces as a nonzero exit with a message") {
    const auto dir = fresh_dir("guard");
    write_file(dir / "spec.json", R"({
      "command": "absorb",
      "instance": {"n": 2, "quality": [1, 1], "cost": [1, 1], "interaction": "na"},
      "N": 200
    })");
    const auto result = run_cli("--spec " + (dir / "spec.json").string() + " --out " +
                                (dir / "out").string());
    CHECK(result.exit_code != 0);
    CHECK(result.output.find("StateSpaceTooLarge") != std::string::npos);
  }

  TEST_CASE("parse errors name the offending key") {
    const auto dir = fresh_dir("badkey");
    write_file(dir / "spec.json", R"({
      "command": "simulate", "speling": 1,
      "instance": {"n": 2, "quality": [1, 1], "cost": [1, 1], "interaction": "na"}
    })");
    const auto result = run_cli("--spec " + (dir / "spec.json").string());
    CHECK(result.exit_code != 0);
    CHECK(result.output.find("speling") != std::string::npos);
  }
}
