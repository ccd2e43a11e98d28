// Exit codes and file handling of the command-line tool.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kProject = std::string(PDOPT_DATA_DIR) + "/automotive_surrogate.json";

int run(const std::string& args) {
  const std::string cmd = std::string("'") + PDOPT_CLI_PATH + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pdopt_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(run("feasibility " + kProject) == 0);
  CHECK(run("--out " + dir.string() + " optimize performance " + kProject + " --target 0.01") == 2);

  std::ofstream(dir / "broken.json") << "{\"m\": 1,";
  CHECK(run("feasibility " + (dir / "broken.json").string()) == 3);
  std::ofstream(dir / "bad_pmf.json")
      << "{\"m\": 1, \"omega_l\": [[0.5]], \"omega_s\": [[0.5]], \"omega_ls\": [[0.2]], \"omega_sl\": [[0.3]],"
         " \"interval_pmf\": {\"1\": 0.5}, \"epsilon\": 0.5, \"cost_exponent_p\": 1}";
  CHECK(run("feasibility " + (dir / "bad_pmf.json").string()) == 3);
  CHECK(run("feasibility " + (dir / "missing.json").string()) == 3);

  CHECK(run("--out " + dir.string() + " synth --model er --m 5 --edge-prob 0 --seed 1") == 4);
  CHECK(run("no-such-command") != 0);
  fs::remove_all(dir);
}

TEST_CASE("reports are not silently replaced") {
  const fs::path dir = scratch("overwrite");
  const std::string args = " optimize budget " + kProject + " --budget 0.5";
  CHECK(run("--out " + dir.string() + args) == 0);
  CHECK(fs::exists(dir / "allocation.json"));
  CHECK(run("--out " + dir.string() + args) != 0);
  CHECK(run("--out " + dir.string() + " --overwrite" + args) == 0);

  const fs::path env_dir = dir / "from_env";
  ::setenv("PDOPT_OUT_DIR", env_dir.c_str(), 1);
  CHECK(run("baseline " + kProject + " --budget 0.5 --focus 2,3,6") == 0);
  ::unsetenv("PDOPT_OUT_DIR");
  CHECK(fs::exists(env_dir / "baseline_allocation.json"));
  fs::remove_all(dir);
}
