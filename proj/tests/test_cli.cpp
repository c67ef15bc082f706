#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, bool capture_stderr = false) {
  std::string cmd = std::string(TRISQRT_CLI_PATH) + " " + args + (capture_stderr ? " 2>&1 1>/dev/null" : " 2>/dev/null");
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST(Cli, QexpDelta) {
  auto r = run("qexp --series delta --nmax 6");
  ASSERT_EQ(r.code, 0);
  auto j = parse(r);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["command"], "qexp");
  EXPECT_EQ(j["result"]["coeffs"][2], "-24");
  EXPECT_EQ(j["result"]["coeffs"][6], "-6048");
}

TEST(Cli, QexpResidueFormat) {
  auto r = run("qexp --series delta --nmax 12 --op tq --q 2 --p 11 --M 2 --format residue");
  ASSERT_EQ(r.code, 0);
  auto j = parse(r);
  EXPECT_EQ(j["result"]["p"], "11");
  // -24 mod 121
  EXPECT_EQ(j["result"]["coeffs"][1], "97");
}

TEST(Cli, HeckeCharpoly) {
  auto r = run("modforms hecke --k 24 --q 2");
  ASSERT_EQ(r.code, 0);
  auto j = parse(r);
  EXPECT_EQ(j["result"]["charpoly"], nlohmann::json({"-20468736", "-1080", "1"}));
}

TEST(Cli, RankScan) {
  auto r = run("hida ranks --p 11 --ks 12 22 24");
  ASSERT_EQ(r.code, 0);
  auto rows = parse(r)["result"]["rows"];
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0]["ordinary_rank"], "1");
  EXPECT_EQ(rows[2]["ordinary_rank"], "0");
}

TEST(Cli, VerifyAtThirtyOne) {
  auto r = run("verify --p 31 --M 4");
  ASSERT_EQ(r.code, 0);
  auto j = parse(r)["result"];
  EXPECT_TRUE(j["verdict"].get<bool>());
  EXPECT_TRUE(j["D"].is_string());
  EXPECT_EQ(j["ep_sign"], "termsum");
}

TEST(Cli, VerifyAtElevenIsNotOrdinary) {
  auto r = run("verify", true);
  EXPECT_EQ(r.code, 3);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["error"]["code"], "NotOrdinary");
  EXPECT_EQ(j["error"]["stage"], "verify");
}

TEST(Cli, ValidationErrors) {
  auto r = run("verify --k 22", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(nlohmann::json::parse(r.out)["error"]["code"], "InvalidArgument");
  EXPECT_EQ(run("verify --p 31 --ep-sign maybe").code, 2);
  EXPECT_EQ(run("verify --p 12").code, 2);
  EXPECT_NE(run("").code, 0);
}

TEST(Cli, IdentityGrid) {
  auto r = run("identity check-ep --grid --kmax 24");
  ASSERT_EQ(r.code, 0);
  auto j = parse(r)["result"];
  EXPECT_TRUE(j["uniform_verdict"].get<bool>());
  EXPECT_TRUE(j["discrepancy_always_2_alpha2_ap_p^-k"].get<bool>());
  EXPECT_EQ(run("identity check-step2 --k 30").code, 0);
}

TEST(Cli, LocalFactor) {
  auto r = run("lfunc local --k 36 --l 12 --m 12 --q 2");
  ASSERT_EQ(r.code, 0);
  auto j = parse(r)["result"];
  EXPECT_EQ(j["polynomial"].size(), 9u);
  EXPECT_EQ(j["field"], "QQ[x]/(x^3 - 139656*x^2 - 59208339456*x - 1467625047588864)");
}

TEST(Cli, DeltaCubedLocalFactor) {
  auto j = parse(run("lfunc local --k 12 --l 12 --m 12 --q 2"));
  EXPECT_EQ(j["result"]["polynomial"][1], "13824");
  EXPECT_EQ(j["result"]["dirichlet_coefficient"], "-13824");
  EXPECT_TRUE(j["result"]["brute_force_agrees"].get<bool>());
}

TEST(Cli, Deterministic) {
  const std::string args = "hida stabilize --k 24 --p 31 --M 4";
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}
