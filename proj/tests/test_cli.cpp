#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "json.hpp"

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI through the shell, stdout and stderr merged.
Run run(const std::string& args) {
  const std::string cmd = std::string(FPCERT_CLI) + " " + args + " 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  std::string out;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe.get())) out += buf.data();
  const int status = pclose(pipe.release());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "fpcert_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, NormExamples) {
  auto r = run("norm --tag lin --coeffs 1,0,0");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("0.8888888888888888", 0), 0u) << r.out;
  r = run("norm --tag james2 --coeffs 1,-1");
  EXPECT_EQ(r.out.rfind("1.41421356", 0), 0u) << r.out;
  r = run("norm --tag sup --coeffs ''");
  EXPECT_EQ(r.out, "0\n");
  r = run("norm --tag lin --coeffs 0,1 --arithmetic rational");
  EXPECT_EQ(r.out, "64/65\n");
  r = run("norm --tag summing --coeffs 1/2,1/2 --arithmetic rational");
  EXPECT_EQ(r.out, "1\n");
}

TEST(Cli, ParseFailuresExitTwo) {
  auto r = run("norm --tag lin --coeffs 1,abc");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("error"), std::string::npos);
  EXPECT_EQ(run("norm --tag wat --coeffs 1").code, 2);
  EXPECT_EQ(run("norm --coeffs 1").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("certify --config /nonexistent.cfg").code, 2);
}

TEST(Cli, CertifyExitCodes) {
  const auto good = scratch("good.cfg");
  std::ofstream(good) << "seed = 1\n[sequence]\nbuiltin = ell1_canonical\nn = 4\n[check.w]\nkind = wide_s\nsamples = 0\n";
  const auto out = scratch("good.json");
  EXPECT_EQ(run("certify --config " + good.string() + " --out " + out.string()).code, 0);
  std::ifstream in(out);
  const auto report = nlohmann::json::parse(in);
  EXPECT_TRUE(report.contains("config"));
  EXPECT_TRUE(report.contains("certificates"));
  EXPECT_TRUE(report.contains("meta"));

  const auto failing = scratch("failing.cfg");
  std::ofstream(failing) << "seed = 1\n[sequence]\nbuiltin = ell1_canonical\nn = 4\n"
                            "[check.d]\nkind = domination\ntarget = self\nclaimed = 1/2\nsamples = 0\n";
  const auto fout = scratch("failing.json");
  EXPECT_EQ(run("certify --config " + failing.string() + " --out " + fout.string()).code, 1);
  std::ifstream fin(fout);
  EXPECT_TRUE(nlohmann::json::parse(fin)["meta"]["failed"].get<bool>());

  const auto bad = scratch("bad.cfg");
  std::ofstream(bad) << "seed = 1\n[sequence]\nbuiltin = ell1_canonical\nn = 4\n[map.f]\ntype = diag_shift\ntheta = 1.5\n";
  const auto r = run("certify --config " + bad.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("theta out of (0,1)"), std::string::npos) << r.out;
}

TEST(Cli, OrbitWritesCsv) {
  const auto cfg = scratch("orbit.cfg");
  std::ofstream(cfg) << "seed = 1\n[sequence]\nbuiltin = ell1_canonical\nn = 6\n[map.r]\ntype = right_shift\n"
                        "[orbit]\nmap = r\nx = vertex:1\ny = vertex:1\nn_window = 2\n";
  const auto r = run("orbit --config " + cfg.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "n,distance\n0,0\n1,2\n2,2\n");
}
