#include <gtest/gtest.h>

#include <sstream>

#include "fpcert/io/config.hpp"
#include "fpcert/io/csv.hpp"
#include "fpcert/io/experiment.hpp"
#include "fpcert/io/report.hpp"
#include "fpcert/io/tags.hpp"

using namespace fpcert;
using namespace fpcert::io;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

const char* kSmall = R"(
seed = 3            # inline comment
arithmetic = rational

[sequence]
builtin = ell1_canonical
n = 6

[map.f]
type = diag_shift
theta = 1/2

[check.chain]
kind = perturbation_chain
map = f

[check.dom]
kind = domination
target = summing_c0
samples = 0

[check.wide]
kind = wide_s
samples = 0
)";

}  // namespace

TEST(Config, ParsesSectionsInOrder) {
  const auto cfg = parse(kSmall);
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.arithmetic, Arithmetic::Rational);
  EXPECT_EQ(cfg.sequence.find("builtin"), "ell1_canonical");
  ASSERT_EQ(cfg.checks.size(), 3u);
  EXPECT_EQ(cfg.checks[0].name, "chain");
  EXPECT_EQ(cfg.checks[1].name, "dom");
  EXPECT_EQ(cfg.checks[2].name, "wide");
  ASSERT_EQ(cfg.maps.size(), 1u);
  EXPECT_EQ(cfg.maps[0].find("theta"), "1/2");
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse("seed = 1\n"), ConfigError);                                  // no sequence
  EXPECT_THROW(parse("seed = x\n[sequence]\nbuiltin = c0_canonical\nn = 2\n"), ConfigError);
  EXPECT_THROW(parse("colour = red\n[sequence]\nn = 2\n"), ConfigError);
  EXPECT_THROW(parse("[sequence]\nn = 2\n[extra]\na = 1\n"), ConfigError);
  EXPECT_THROW(parse("[sequence]\nn = 2\n[sequence]\nn = 3\n"), ConfigError);
  EXPECT_THROW(parse("[sequence\nn = 2\n"), ConfigError);
  EXPECT_THROW(parse("arithmetic = decimal\n[sequence]\nn = 2\n"), ConfigError);
}

TEST(Config, ExperimentValidation) {
  RunOptions opt;
  auto expect_config_error = [&](const std::string& text, const std::string& fragment) {
    try {
      certify(parse(text), opt);
      ADD_FAILURE() << "no error for: " << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_config_error("[sequence]\nbuiltin = c0_canonical\nn = 2\n", "seed is mandatory");
  expect_config_error("seed = 1\n[sequence]\nbuiltin = c0_canonical\nn = 0\n", "n must be >= 1");
  expect_config_error("seed = 1\n[sequence]\nbuiltin = nope\nn = 2\n", "unknown builtin");
  expect_config_error("seed = 1\n[space]\ntag = sup\n[sequence]\nbuiltin = ell1_canonical\nn = 2\n", "does not match");
  expect_config_error("seed = 1\n[sequence]\nbuiltin = c0_canonical\nn = 4\n[map.f]\ntype = diag_shift\ntheta = 1.5\n",
                      "theta out of (0,1)");
  expect_config_error("seed = 1\n[sequence]\nbuiltin = c0_canonical\nn = 4\n[check.x]\nkind = shift_equivalence\n",
                      "missing required key 'p_max'");
  expect_config_error("seed = 1\n[sequence]\nbuiltin = c0_canonical\nn = 4\n[check.x]\nkind = wuc\nbogus = 1\n",
                      "unknown key 'bogus'");
  expect_config_error("seed = 1\n[sequence]\nbuiltin = c0_canonical\nn = 4\n[map.r]\ntype = right_shift\n"
                      "[check.x]\nkind = fixed_point_residual\nmap = r\nblocks = 2\n",
                      "unknown key 'blocks'");
  expect_config_error("seed = 1\n[sequence]\nbuiltin = c0_canonical\nn = 4\n[check.x]\nkind = perturbation_chain\nmap = g\n",
                      "unknown map 'g'");
  expect_config_error("seed = 1\narithmetic = rational\n[sequence]\nbuiltin = james_summing\nn = 4\n", "RATIONAL");
}

TEST(Csv, ReadsDecimalAndFractionsWithHeader) {
  std::istringstream in("x1,x2,x3\n1,0,0\n1/2, 1/2 ,0\n# comment\n0.25,0,3/4\n");
  const auto rows = read_vectors_csv<Rational>(in);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], (CoordinateVector<Rational>{Rational(1, 2), Rational(1, 2), 0}));
  EXPECT_EQ(rows[2](1), Rational(1, 4));
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_vectors_csv<double>(ragged), ConfigError);
  std::istringstream bad("1,2\n3,x\n");
  EXPECT_THROW(read_vectors_csv<double>(bad), ConfigError);
  std::istringstream empty("a,b\n");
  EXPECT_THROW(read_vectors_csv<double>(empty), ConfigError);
}

TEST(Tags, Parse) {
  EXPECT_EQ(parse_tag("sup").tag, NormTag::sup());
  EXPECT_EQ(parse_tag("lin").tag, NormTag::lin());
  EXPECT_EQ(parse_tag("l1").tag, NormTag::ell_p(1.0));
  EXPECT_EQ(parse_tag("ell2.5").tag, NormTag::ell_p(2.5));
  EXPECT_EQ(parse_tag("James2").tag, NormTag::james(2.0));
  EXPECT_TRUE(parse_tag("summing").summing());
  EXPECT_THROW(parse_tag("james1"), ConfigError);
  EXPECT_THROW(parse_tag("l0.5"), ConfigError);
  EXPECT_THROW(parse_tag("lp"), ConfigError);
  EXPECT_THROW(parse_tag("max"), ConfigError);
}

TEST(Report, CertificateSchema) {
  Certificate<Rational> c;
  c.kind = "demo";
  c.set("value", Rational(1, 3));
  c.witnesses.push_back({"w", {CoordinateVector<Rational>{1, Rational(1, 2)}}});
  c.holds = true;
  const auto j = certificate_json(c);
  for (const char* key : {"kind", "constants", "holds", "witness", "mode", "arithmetic"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["constants"]["value"], "1/3");
  EXPECT_EQ(j["arithmetic"], "RATIONAL");
  EXPECT_EQ(j["witness"][0]["vectors"][0][1], "1/2");
  EXPECT_EQ(j["mode"]["label"], "EXHAUSTIVE");
}

TEST(Experiment, RunsChecksInConfigOrder) {
  RunOptions opt;
  const auto result = certify(parse(kSmall), opt);
  EXPECT_EQ(result.exit_code, 0);
  const auto& certs = result.report["certificates"];
  ASSERT_EQ(certs.size(), 3u);
  EXPECT_EQ(certs[0]["name"], "chain");
  EXPECT_EQ(certs[0]["kind"], "perturbation_chain");
  EXPECT_EQ(certs[1]["constants"]["L_hat"], "1");
  EXPECT_EQ(certs[2]["constants"]["d_hat"], "1");
  EXPECT_EQ(result.report["config"]["seed"], 3u);
  EXPECT_EQ(result.report["meta"]["sequence"]["truncation"], 6u);
  EXPECT_FALSE(result.report["meta"]["failed"].get<bool>());
}

TEST(Experiment, SeedAndArithmeticOverrides) {
  RunOptions opt;
  opt.seed = 99;
  opt.arithmetic = Arithmetic::Float;
  const auto result = certify(parse(kSmall), opt);
  EXPECT_EQ(result.report["config"]["seed"], 99u);
  EXPECT_EQ(result.report["certificates"][1]["arithmetic"], "FLOAT");
  EXPECT_EQ(result.report["certificates"][1]["constants"]["L_hat"], 1.0);
}

TEST(Experiment, FailingCheckMarksReport) {
  const auto cfg = parse(
      "seed = 1\n[sequence]\nbuiltin = ell1_canonical\nn = 4\n"
      "[check.dom]\nkind = domination\ntarget = self\nclaimed = 1/2\nsamples = 0\n"
      "[check.ok]\nkind = wuc\nsamples = 0\n");
  const auto result = certify(cfg, RunOptions{});
  EXPECT_EQ(result.exit_code, 1);
  EXPECT_TRUE(result.report["meta"]["failed"].get<bool>());
  EXPECT_FALSE(result.report["certificates"][0]["holds"].get<bool>());
  EXPECT_TRUE(result.report["certificates"][1]["holds"].get<bool>());
}

TEST(Experiment, RuntimeErrorsBecomeFailedEntries) {
  // Bilateral with odd n only fails once the check runs.
  const auto cfg = parse(
      "seed = 1\n[sequence]\nbuiltin = ell1_canonical\nn = 5\n"
      "[map.b]\ntype = bilateral\n"
      "[check.m]\nkind = mass_affinity\nmap = b\nsamples = 10\n");
  const auto result = certify(cfg, RunOptions{});
  EXPECT_EQ(result.exit_code, 1);
  EXPECT_TRUE(result.report["certificates"][0].contains("error"));
}

TEST(Experiment, BlocksOption) {
  const auto cfg = parse(
      "seed = 1\narithmetic = rational\n[sequence]\nbuiltin = summing_c0\nn = 8\n"
      "[check.b]\nkind = summing_equivalence\nc1 = 1\nc2 = 1\nblocks = 2\nsamples = 0\n");
  const auto result = certify(cfg, RunOptions{});
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.report["certificates"][0]["evaluated"], 80u);
}

TEST(Experiment, CsvSequence) {
  const auto dir = std::filesystem::temp_directory_path() / "fpcert_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "v.csv");
    csv << "a,b,c\n1,0,0\n1,1,0\n1,1,1\n";
  }
  std::istringstream in("seed = 2\narithmetic = rational\n[space]\ntag = sup\n[sequence]\ncsv = v.csv\nsamples = 0\n"
                        "[check.k]\nkind = basis_constant\nsamples = 0\n");
  const auto cfg = parse_config(in, dir);
  const auto result = certify(cfg, RunOptions{});
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.report["meta"]["sequence"]["kappa_lower"], "2");
  EXPECT_EQ(result.report["certificates"][0]["constants"]["kappa_lower"], "2");
}

TEST(Orbit, RightShiftDeltas) {
  const auto cfg = parse(
      "seed = 1\n[sequence]\nbuiltin = ell1_canonical\nn = 8\n[map.r]\ntype = right_shift\n"
      "[orbit]\nmap = r\nx = vertex:1\ny = vertex:1\nn_window = 3\n");
  EXPECT_EQ(orbit(cfg, RunOptions{}), "n,distance\n0,0\n1,2\n2,2\n3,2\n");
  auto zero = cfg;
  zero.orbit->entries.back().second = "0";
  EXPECT_EQ(orbit(zero, RunOptions{}), "n,distance\n0,0\n");
}

TEST(Orbit, DiagShiftRowsRecordBounds) {
  const auto cfg = parse(
      "seed = 1\narithmetic = rational\n[sequence]\nbuiltin = ell1_canonical\nn = 10\n"
      "[map.d]\ntype = diag_shift\ntheta = 1/2\n"
      "[orbit]\nmap = d\nx = vertex:1\ny = uniform\nn_window = 5\n");
  std::istringstream rows(orbit(cfg, RunOptions{}));
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, "n,distance,pair_distance,lower_bound,upper_bound,within_bounds");
  std::size_t count = 0;
  while (std::getline(rows, line)) {
    ++count;
    if (count == 1) continue;
    EXPECT_EQ(line.back(), '1') << line;
  }
  EXPECT_EQ(count, 6u);
}
