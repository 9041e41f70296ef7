#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(CNLS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string scenario(const std::string& name) {
  return std::string(CNLS_SCENARIO_DIR) + "/" + name + ".ini";
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path out = fs::temp_directory_path() / "cnls_cli_test";
  fs::remove_all(out);
  EXPECT_EQ(cli("list-scenarios --dir " + std::string(CNLS_SCENARIO_DIR)), 0);
  EXPECT_EQ(cli("run --scenario " + scenario("bad_step") + " --out " + (out / "bad").string()), 2);
  EXPECT_EQ(cli("run --scenario /nonexistent.ini --out " + (out / "none").string()), 2);
  EXPECT_EQ(cli("verify " + (out / "missing").string()), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("run --scenario " + scenario("focusing_blowup") + " --out " + (out / "blow").string()), 3);
  EXPECT_TRUE(fs::exists(out / "blow" / "manifest.json"));
}

TEST(Cli, RunThenVerify) {
  const fs::path out = fs::temp_directory_path() / "cnls_cli_det";
  fs::remove_all(out);
  ASSERT_EQ(cli("run --scenario " + scenario("determinism") + " --out " + out.string()), 0);
  EXPECT_EQ(cli("verify " + out.string()), 0);
}

TEST(Cli, OutputRootFromEnvironment) {
  const fs::path root = fs::temp_directory_path() / "cnls_cli_env";
  fs::remove_all(root);
  const std::string cmd = "CNLS_OUT_DIR=" + root.string() + " " + CNLS_CLI + " run --scenario " +
                          scenario("bad_step") + " > /dev/null 2>&1";
  EXPECT_NE(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(root / "bad_step" / "manifest.json"));
}
