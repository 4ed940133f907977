#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "sipmark_cli.hpp"
#include "test_support.hpp"

namespace sipmark::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;

  std::vector<json> lines() const {
    std::vector<json> v;
    std::istringstream in(out);
    for (std::string line; std::getline(in, line);) v.push_back(json::parse(line));
    return v;
  }
};

Result cli(std::vector<std::string> args, const char* config = nullptr) {
  args.insert(args.begin(), "sipmark");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err, config);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sipmark_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::string fx(const std::string& name) { return test::fixture_path(name); }

TEST_F(Cli, EmbedVerifyExtract) {
  const auto out = tmp("grid.pdf");
  auto r = cli({"embed", "--scheme", "grid", "-w", "4", "--verify", fx("letter_blank"), out});
  ASSERT_EQ(r.code, kOk) << r.out << r.err;
  const auto report = r.lines().at(0);
  EXPECT_EQ(report["status"], "ok");
  EXPECT_EQ(report["w"], 4);
  EXPECT_EQ(report["verified"], true);
  EXPECT_EQ(report["sip"], json({4, 7, 6, 1, 5, 3, 2}));
  EXPECT_EQ(report["schema_version"], 1);

  r = cli({"extract", "--scheme", "grid", out});
  ASSERT_EQ(r.code, kOk);
  EXPECT_EQ(r.lines().at(0)["w"], 4);
}

TEST_F(Cli, HexWatermarkAndSpacing) {
  const auto out = tmp("spacing.pdf");
  auto r = cli({"embed", "--scheme", "spacing", "-w", "0x1F", "--delta", "80", "--verify",
                fx("long_paragraph"), out});
  ASSERT_EQ(r.code, kOk) << r.out;
  r = cli({"extract", "--scheme", "spacing", "--delta", "80", out});
  EXPECT_EQ(r.lines().at(0)["w"], 31);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(cli({"embed", "--scheme", "spacing", "-w", "4", fx("hello_world"), tmp("a.pdf")}).code,
            kCapacity);
  EXPECT_FALSE(fs::exists(tmp("a.pdf")));
  EXPECT_EQ(cli({"extract", fx("hello_world")}).code, kNotWatermarked);
  EXPECT_EQ(cli({"extract", "--scheme", "structure", fx("hello_world")}).code, kNotWatermarked);
  EXPECT_EQ(cli({"inspect", fx("encrypted")}).code, kUnsupported);
  EXPECT_EQ(cli({"extract", tmp("missing.pdf")}).code, kParse);
  EXPECT_EQ(cli({"embed", "-w", "0", fx("hello_world"), tmp("b.pdf")}).code, kUsage);
  EXPECT_EQ(cli({"embed", "-w", "99999999999999999999", fx("hello_world"), tmp("b.pdf")}).code,
            kUsage);
  EXPECT_EQ(cli({"embed", "-w", "4", "--delta", "5", fx("hello_world"), tmp("b.pdf")}).code, kUsage);
  EXPECT_EQ(cli({"embed", "--scheme", "ink", "-w", "4", fx("hello_world"), tmp("b.pdf")}).code,
            kUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kUsage);
  EXPECT_EQ(cli({}).code, kUsage);
  EXPECT_EQ(exit_code_for(Status::verify_mismatch), kVerifyMismatch);
  EXPECT_EQ(exit_code_for(Status::extraction_failed), kNotWatermarked);
  EXPECT_EQ(exit_code_for(Status::embedding_error), kCapacity);
}

TEST_F(Cli, Help) {
  const auto r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("embed"), std::string::npos);
}

TEST_F(Cli, DryRunWritesNothing) {
  const auto r = cli({"embed", "-w", "9", "--dry-run", fx("letter_blank"), tmp("x.pdf")});
  EXPECT_EQ(r.code, kOk);
  EXPECT_FALSE(fs::exists(tmp("x.pdf")));
  EXPECT_TRUE(r.lines().at(0)["output"].is_null());
}

TEST_F(Cli, StructureDryRunReportsEdges) {
  const auto out = tmp("s.pdf");
  ASSERT_EQ(cli({"embed", "--scheme", "structure", "-w", "4", fx("deep_xobjects"), out}).code, kOk);
  const auto r = cli({"extract", "--scheme", "structure", "--dry-run", out});
  ASSERT_EQ(r.code, kOk);
  const auto j = r.lines().at(0);
  EXPECT_TRUE(j["w"].is_null());
  EXPECT_EQ(j["locations"]["edges"].size(), 7u);
  EXPECT_EQ(j["n_star"], 7);
}

TEST_F(Cli, BatchOutputIndependentOfJobs) {
  std::vector<std::string> files;
  for (std::uint64_t w : {3, 4, 5, 6, 100}) {
    files.push_back(tmp("w" + std::to_string(w) + ".pdf"));
    ASSERT_EQ(cli({"embed", "-w", std::to_string(w), fx("letter_blank"), files.back()}).code, kOk);
  }
  files.push_back(fx("hello_world"));
  std::vector<std::string> args{"extract"};
  args.insert(args.end(), files.begin(), files.end());
  const auto serial = cli(args);
  args.insert(args.end(), {"--jobs", "4"});
  const auto parallel = cli(args);
  EXPECT_EQ(serial.out, parallel.out);
  EXPECT_EQ(serial.code, kNotWatermarked);
  EXPECT_EQ(parallel.code, kNotWatermarked);
  const auto lines = serial.lines();
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[4]["w"], 100);
  EXPECT_EQ(lines[5]["status"], "extraction-failed");
}

TEST_F(Cli, ConfigFileDefaultsAndPrecedence) {
  const auto cfg = tmp("cfg.json");
  {
    std::ofstream(cfg) << R"({"scheme": "structure", "max_depth": 4096})";
  }
  const auto out = tmp("c.pdf");
  auto r = cli({"embed", "-w", "1", fx("deep_xobjects"), out}, cfg.c_str());
  ASSERT_EQ(r.code, kOk) << r.out << r.err;
  EXPECT_EQ(r.lines().at(0)["scheme"], "structure");
  r = cli({"embed", "--scheme", "grid", "-w", "1", fx("letter_blank"), out}, cfg.c_str());
  EXPECT_EQ(r.lines().at(0)["scheme"], "grid");

  std::ofstream(cfg) << R"({"colour": "red"})";
  EXPECT_EQ(cli({"extract", fx("hello_world")}, cfg.c_str()).code, kUsage);
  std::ofstream(cfg) << "not json";
  EXPECT_EQ(cli({"extract", fx("hello_world")}, cfg.c_str()).code, kUsage);
}

TEST_F(Cli, Inspect) {
  auto r = cli({"inspect", "--json", fx("deep_xobjects"), fx("hello_world")});
  ASSERT_EQ(r.code, kOk);
  const auto lines = r.lines();
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0]["capacity"]["structure"]["path_order"], 40);
  EXPECT_EQ(lines[0]["capacity"]["structure"]["max_n_star"], 39);
  EXPECT_EQ(lines[1]["pages"], 1);
  EXPECT_EQ(lines[1]["object_kinds"]["stream"], 1);
  EXPECT_EQ(lines[1]["object_kinds"]["array"], 1);
  r = cli({"inspect", fx("hello_world")});
  EXPECT_NE(r.out.find("page tree depth 1"), std::string::npos);
}

TEST_F(Cli, Selftest) {
  std::ostringstream out;
  Options o;
  EXPECT_EQ(cmd_selftest(o, out), kOk);
  EXPECT_NE(out.str().find("selftest passed"), std::string::npos);

  CodecFunctions broken;
  broken.decode_w = [](const SelfInvertingPermutation& pi) { return decode_sip_to_w(pi) + 1; };
  std::ostringstream bad;
  EXPECT_EQ(cmd_selftest(o, bad, broken), kSelftestFailed);
  EXPECT_NE(bad.str().find("FAIL"), std::string::npos);
}

TEST(CliParsing, Values) {
  EXPECT_EQ(parse_watermark("0x10"), 16u);
  EXPECT_EQ(parse_watermark("18446744073709551615"), ~std::uint64_t{0});
  EXPECT_THROW(parse_watermark("-3"), Error);
  EXPECT_THROW(parse_watermark("12a"), Error);
  EXPECT_EQ(parse_color("#FF0000"), (std::array<double, 3>{1, 0, 0}));
  EXPECT_THROW(parse_color("FFF"), Error);
  const auto p = parse_paragraph("2:3");
  EXPECT_EQ(p.page_index, 1u);
  EXPECT_EQ(p.stream_index, 2u);
  EXPECT_THROW(parse_paragraph("0:1"), Error);
  EXPECT_THROW(parse_paragraph("3"), Error);
}

}  // namespace
}  // namespace sipmark::cli
