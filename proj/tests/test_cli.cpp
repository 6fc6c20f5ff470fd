#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Run run(const std::string& args) {
  const std::string cmd = std::string(PSECTOR_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) out += buf.data();
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string tmp_dir() {
  const auto d = std::filesystem::temp_directory_path() / "psector_cli_test";
  std::filesystem::create_directories(d);
  return d.string();
}

}  // namespace

TEST_CASE("exponent command") {
  auto r = run("exponent --nu 1 --p 2");
  CHECK(r.code == 0);
  CHECK(r.out == "k = 1\n");
  r = run("exponent --nu 0.5 --p 3");
  CHECK(r.out == "k = 0.6666666667\n");
  r = run("exponent --nu 0.4 --p 3");
  CHECK(r.code == 2);
  CHECK(r.out.find("nu must be >= 0.5") != std::string::npos);
  r = run("exponent --nu 2 --p inf --derivatives");
  CHECK(r.code == 0);
  CHECK(r.out.find("k = 1.333333333") != std::string::npos);
  CHECK(run("exponent --nu 2 --p 0.5").code == 2);
  CHECK(run("exponent --nu 2").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("profile command") {
  const std::string out = tmp_dir() + "/prof.csv";
  auto r = run("profile --nu 1 --p 1.5 --samples 64 --out " + out);
  CHECK(r.code == 0);
  CHECK(r.out.find("case = P_LT2_STREAM") != std::string::npos);
  CHECK(std::filesystem::exists(out));
  CHECK(run("profile --nu 1 --p 1 --out " + out).code == 2);
}

TEST_CASE("measure command writes outputs and signals non-convergence") {
  const std::string dir = tmp_dir() + "/m";
  auto r = run("--out-dir " + dir + " measure --nu 1 --p 2 --n-r 32 --n-phi 32");
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir + "/measure_1_2.json"));
  CHECK(std::filesystem::exists(dir + "/measure_1_2.csv"));
  r = run("--out-dir " + dir + " measure --nu 1 --p 4 --n-r 32 --n-phi 32 --max-iter 1");
  CHECK(r.code == 4);
  CHECK(std::filesystem::exists(dir + "/measure_1_4.json"));
  CHECK(run("--out-dir " + dir + " measure --nu 1 --p 2 --n-phi 33").code == 2);
}

TEST_CASE("config file is honoured and flags override it") {
  const std::string dir = tmp_dir();
  const std::string cfg = dir + "/c.cfg";
  std::FILE* f = std::fopen(cfg.c_str(), "w");
  std::fputs("n_r = 16\nn_phi = 16\nout_dir = " , f);
  std::fputs((dir + "/from_cfg\n").c_str(), f);
  std::fclose(f);
  CHECK(run("--config " + cfg + " measure --nu 1 --p 2").code == 0);
  CHECK(std::filesystem::exists(dir + "/from_cfg/measure_1_2.json"));
  CHECK(run("--config " + cfg + " measure --nu 1 --p 2 --n-r 32").code == 0);
  std::FILE* in = std::fopen((dir + "/from_cfg/measure_1_2.json").c_str(), "r");
  REQUIRE(in != nullptr);
  std::string json;
  for (int c = std::fgetc(in); c != EOF; c = std::fgetc(in)) json += static_cast<char>(c);
  std::fclose(in);
  CHECK(json.find("\"n_r\": 32") != std::string::npos);
  CHECK(json.find("\"n_phi\": 16") != std::string::npos);
  const std::string bad = dir + "/bad.cfg";
  f = std::fopen(bad.c_str(), "w");
  std::fputs("colour = blue\n", f);
  std::fclose(f);
  const auto r = run("--config " + bad + " exponent --nu 1 --p 2");
  CHECK(r.code == 2);
  CHECK(r.out.find("unknown key") != std::string::npos);
}

TEST_CASE("verify command") {
  const std::string dir = tmp_dir() + "/v";
  auto r = run("--out-dir " + dir + " verify exponent");
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir + "/exponent_table_grid_grid.json"));
  r = run("verify bogus");
  CHECK(r.code == 2);
  CHECK(r.out.find("unknown suite") != std::string::npos);
}
