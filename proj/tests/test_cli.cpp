#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string command = std::string(STOCHMATCH_CLI_PATH) + " " + args + " 2>/dev/null";
  Result result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buffer{};
  while (std::fgets(buffer.data(), buffer.size(), pipe)) result.out += buffer.data();
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("stochmatch_cli_" + name)).string();
}

TEST(CliTest, TopHalfConstant) {
  const auto result = run("verify --which top-half");
  EXPECT_EQ(result.code, 0);
  EXPECT_NE(result.out.find("0.70626"), std::string::npos);
}

TEST(CliTest, MissingInstance) {
  const std::string command =
      std::string(STOCHMATCH_CLI_PATH) + " lp --instance /nonexistent/x.json 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string text;
  std::array<char, 4096> buffer{};
  while (std::fgets(buffer.data(), buffer.size(), pipe)) text += buffer.data();
  const int status = pclose(pipe);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(text.find("instance not found"), std::string::npos);
}

TEST(CliTest, BadArguments) {
  EXPECT_EQ(run("verify --which nonsense").code, 2);
  EXPECT_EQ(run("simulate").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("verify --which second-level --dt 0.003").code, 2);
}

TEST(CliTest, Hardness) {
  const auto result = run("verify --which hardness --n 100000 --x 0.94");
  EXPECT_EQ(result.code, 0);
  EXPECT_NE(result.out.find("\"k_star\""), std::string::npos);
}

TEST(CliTest, GenLpSimulateRoundTrip) {
  const std::string instance = temp_path("instance.json");
  EXPECT_EQ(run("gen --kind random --types 4 --offline 3 --edge-prob 0.7 --seed 3 --out " +
                instance)
                .code,
            0);
  ASSERT_TRUE(std::filesystem::exists(instance));
  const auto lp = run("lp --instance " + instance + " --level 2");
  EXPECT_EQ(lp.code, 0);
  EXPECT_NE(lp.out.find("\"objective\""), std::string::npos);
  EXPECT_NE(lp.out.find("\"optimal\""), std::string::npos);

  const std::string args = "simulate --instance " + instance + " --algo ocs --trials 2000";
  const auto first = run(args);
  const auto second = run(args);
  EXPECT_EQ(first.code, 0);
  EXPECT_EQ(first.out, second.out);
  EXPECT_NE(first.out.find("\"ratio\""), std::string::npos);

  const auto csv = run("simulate --instance " + instance +
                       " --algo greedy --trials 10 --model fixed --lambda 3 --format csv");
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "alg_value,opt_value");
  EXPECT_EQ(run("simulate --instance " + instance + " --model fixed").code, 2);
  std::filesystem::remove(instance);
}

TEST(CliTest, JlInstanceLp) {
  const std::string instance = temp_path("jl.json");
  ASSERT_EQ(run("gen --kind jaillet-lu --out " + instance).code, 0);
  const auto lp = run("lp --instance " + instance + " --jl");
  EXPECT_EQ(lp.code, 0);
  EXPECT_NE(lp.out.find("\"objective\": 2"), std::string::npos) << lp.out;
  std::filesystem::remove(instance);
}

TEST(CliTest, FailedTargetExitsOne) {
  const auto result =
      run("verify --which second-level --dt 0.01 --dx 0.01 --dlambda 0.01 --xs 1 --target 0.99");
  EXPECT_EQ(result.code, 1);
}

}  // namespace
