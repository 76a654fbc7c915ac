#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "halftone/cli.h"
#include "halftone/diffusion.h"
#include "halftone/image.h"
#include "halftone/pgm.h"

namespace halftone::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "halftone");
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("halftone_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string WriteGray(const std::string& name, int w, int h, double value) {
    SavePgm(GrayImage::Filled(w, h, value), Path(name));
    return Path(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, HalftoneWritesBinaryImage) {
  const auto in = WriteGray("in.pgm", 16, 12, 0.4);
  const auto r = Invoke({"halftone", in, Path("out.pgm"), "--scheme", "fs1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const GrayImage g = LoadPgm(Path("out.pgm"));
  EXPECT_EQ(g.width(), 16);
  for (double v : g.values()) EXPECT_TRUE(v == 0.0 || v == 1.0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["scheme"], "fs1");
  EXPECT_EQ(j["scan"], "raster");
  EXPECT_LE(j["v_max_abs"].get<double>(), 1.0);
}

TEST_F(CliTest, SecondOrderOnWhiteMatchesRecurrence) {
  const auto in = WriteGray("white.pgm", 20, 10, 1.0);
  const auto r = Invoke({"halftone", in, Path("out.pgm"), "--scheme", "fs2-33"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const GrayImage out = LoadPgm(Path("out.pgm"));
  // Oracle: the rescaled constant 0.97 fed through the recurrence by hand.
  // The residual -0.03 accumulates, so black pixels do appear.
  const auto scheme = *diffusion::FindBuiltinScheme("fs2-33");
  const int w = 20, h = 10;
  std::vector<double> v(w * h, 0.0);
  double vmax = 0.0;
  int black = 0;
  for (int m = 0; m < h; ++m) {
    for (int n = 0; n < w; ++n) {
      double s = 0.0;
      for (const auto& e : scheme.entries()) {
        const auto taps = e.filter.TapsAsDouble();
        for (std::size_t k = 0; k < taps.size(); ++k) {
          const int mm = m - e.direction.di * static_cast<int>(k + 1);
          const int nn = n - e.direction.dj * static_cast<int>(k + 1);
          if (mm < 0 || nn < 0 || nn >= w) continue;
          s += boost::rational_cast<double>(e.weight) * taps[k] * v[mm * w + nn];
        }
      }
      const double x = s + 0.97;
      const double q = x > 0.0 ? 1.0 : -1.0;
      if (q < 0) ++black;
      EXPECT_EQ(out.at(m, n), q > 0 ? 1.0 : 0.0) << m << "," << n;
      v[m * w + n] = x - q;
      vmax = std::max(vmax, std::abs(v[m * w + n]));
    }
  }
  EXPECT_GT(black, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["v_max_abs"].get<double>(), vmax, 1e-12);
  // Without rescaling white is an exact fixed point.
  const auto raw = Invoke({"halftone", in, Path("raw.pgm"), "--scheme", "fs2-33",
                           "--no-rescale"});
  EXPECT_EQ(nlohmann::json::parse(raw.out)["v_max_abs"].get<double>(), 0.0);
  const GrayImage raw_img = LoadPgm(Path("raw.pgm"));
  for (double x : raw_img.values()) EXPECT_EQ(x, 1.0);
}

TEST_F(CliTest, UnknownSchemeListsBuiltins) {
  const auto in = WriteGray("in.pgm", 4, 4, 0.5);
  const auto r = Invoke({"halftone", in, Path("out.pgm"), "--scheme", "nosuch"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("fs2-33"), std::string::npos);
  EXPECT_EQ(Invoke({"expand", "nosuch"}).code, kExitUsage);
}

TEST_F(CliTest, MissingInputIsIoError) {
  EXPECT_EQ(Invoke({"halftone", Path("none.pgm"), Path("o.pgm")}).code, kExitIo);
  std::ofstream(Path("bad.pgm")) << "P7\n";
  EXPECT_EQ(Invoke({"halftone", Path("bad.pgm"), Path("o.pgm")}).code, kExitIo);
}

TEST_F(CliTest, CustomSchemeFromJson) {
  std::ofstream(Path("row.json"))
      << R"({"name": "row", "order": 1, "entries": [{"di": 0, "dj": 1,
             "weight": "1", "taps": ["1"]}]})";
  const auto r = Invoke({"expand", Path("row.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("[1]"), std::string::npos);
  EXPECT_NE(r.out.find("-1"), std::string::npos);
}

TEST_F(CliTest, ExpandPrintsReferenceGrids) {
  const auto a23 = Invoke({"expand", "a23"});
  ASSERT_EQ(a23.code, kExitOk);
  const std::string top = a23.out.substr(0, a23.out.find('\n'));
  EXPECT_NE(top.find("-3/4"), std::string::npos);
  EXPECT_NE(top.find("1/4"), std::string::npos);
  const auto fs2 = Invoke({"expand", "fs2-33"});
  for (const char* f : {"-28/48", "7/48", "-12/48", "-20/48", "-4/48", "3/48",
                        "5/48", "1/48"}) {
    EXPECT_NE(fs2.out.find(f), std::string::npos) << f;
  }
  const auto fs1 = Invoke({"expand", "fs1"});
  for (const char* f : {"-7/16", "-3/16", "-5/16", "-1/16"}) {
    EXPECT_NE(fs1.out.find(f), std::string::npos) << f;
  }
}

TEST_F(CliTest, DotsDeterministicAndSnapped) {
  const auto in = WriteGray("gray.pgm", 16, 16, 0.5);
  const std::vector<std::string> base{"dots", in, "--seed", "5", "--iters", "300"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", Path("a.csv"), "--snap", Path("a.pgm")});
  b.insert(b.end(), {"--out", Path("b.csv")});
  const auto ra = Invoke(a);
  const auto rb = Invoke(b);
  ASSERT_EQ(ra.code, kExitOk) << ra.err;
  ASSERT_EQ(rb.code, kExitOk) << rb.err;
  EXPECT_EQ(ReadFile(Path("a.csv")), ReadFile(Path("b.csv")));
  const auto j = nlohmann::json::parse(ra.out);
  const int m = j["m"].get<int>();
  EXPECT_EQ(m, 127);
  EXPECT_LT(j["final_energy"].get<double>(), j["initial_energy"].get<double>());
  const BinaryImage snapped = ToBinary(LoadPgm(Path("a.pgm")));
  EXPECT_EQ(snapped.CountBlack(), static_cast<std::size_t>(m));
}

TEST_F(CliTest, DotsOnWhiteIsDegenerate) {
  const auto in = WriteGray("white.pgm", 8, 8, 1.0);
  EXPECT_EQ(Invoke({"dots", in, "--out", Path("d.csv")}).code, kExitUsage);
}

TEST_F(CliTest, MetricsZeroCasesAndNonnegativity) {
  const auto white = WriteGray("white.pgm", 16, 16, 1.0);
  const auto self = Invoke({"metrics", white, white, "--metric", "lowpass"});
  ASSERT_EQ(self.code, kExitOk) << self.err;
  EXPECT_EQ(nlohmann::json::parse(self.out)["lowpass_error"].get<double>(), 0.0);

  ASSERT_EQ(Invoke({"halftone", white, Path("ht.pgm")}).code, kExitOk);
  const auto fixed = Invoke({"metrics", white, Path("ht.pgm"), "--metric", "lowpass"});
  EXPECT_EQ(nlohmann::json::parse(fixed.out)["lowpass_error"].get<double>(), 0.0);

  const auto gray = WriteGray("gray.pgm", 16, 16, 0.3);
  ASSERT_EQ(Invoke({"halftone", gray, Path("g.pgm")}).code, kExitOk);
  const auto all = Invoke({"metrics", gray, Path("g.pgm"), "--metric",
                           "quadrature,fourier,ball,lowpass"});
  ASSERT_EQ(all.code, kExitOk) << all.err;
  const auto j = nlohmann::json::parse(all.out);
  EXPECT_EQ(j.size(), 4u);
  for (const auto& [key, value] : j.items()) EXPECT_GE(value.get<double>(), 0.0) << key;

  const auto small = WriteGray("small.pgm", 8, 8, 0.3);
  EXPECT_EQ(Invoke({"metrics", gray, small}).code, kExitUsage);
}

TEST_F(CliTest, DecayExitCodes) {
  const auto first = Invoke({"decay", "--out", Path("r.json"), "--csv", Path("r.csv")});
  ASSERT_EQ(first.code, kExitOk) << first.err;
  const auto rep = nlohmann::json::parse(ReadFile(Path("r.json")));
  EXPECT_EQ(rep["lambdas"].size(), 5u);
  EXPECT_LT(rep["fitted_slope"].get<double>(), -0.75);
  EXPECT_EQ(ReadFile(Path("r.csv")).substr(0, 22), "lambda,error,v_max_abs");

  const auto synth = Invoke({"decay", "--synthetic", "2"});
  ASSERT_EQ(synth.code, kExitOk);
  EXPECT_NEAR(nlohmann::json::parse(synth.out)["fitted_slope"].get<double>(), -2.0,
              1e-10);

  EXPECT_EQ(Invoke({"decay", "--lambdas", "4,8"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"decay", "--synthetic", "2", "--expect-slope", "-1"}).code,
            kExitOk);
  EXPECT_EQ(Invoke({"decay", "--synthetic", "2", "--expect-slope", "-1",
                    "--two-sided"}).code,
            kExitBenchmark);
  EXPECT_EQ(Invoke({"decay", "--synthetic", "1", "--expect-slope", "-2"}).code,
            kExitBenchmark);
}

TEST_F(CliTest, ByteIdenticalReruns) {
  const auto in = WriteGray("in.pgm", 24, 24, 0.35);
  for (const char* s : {"fs1", "jjn2-33"}) {
    ASSERT_EQ(Invoke({"halftone", in, Path("1.pgm"), "--scheme", s, "--scan",
                      "serpentine"}).code, kExitOk);
    ASSERT_EQ(Invoke({"halftone", in, Path("2.pgm"), "--scheme", s, "--scan",
                      "serpentine"}).code, kExitOk);
    EXPECT_EQ(ReadFile(Path("1.pgm")), ReadFile(Path("2.pgm"))) << s;
  }
  Invoke({"decay", "--seed", "3", "--out", Path("1.json")});
  Invoke({"decay", "--seed", "3", "--out", Path("2.json")});
  EXPECT_EQ(ReadFile(Path("1.json")), ReadFile(Path("2.json")));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"halftone"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
}

int RunBinary(const std::string& args) {
  const int status = std::system((std::string(HALFTONE_BIN) + " " + args +
                                  " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CliTest, BinaryExitCodes) {
  EXPECT_EQ(RunBinary("expand fs1"), kExitOk);
  EXPECT_EQ(RunBinary("expand nosuch"), kExitUsage);
  EXPECT_EQ(RunBinary("halftone " + Path("missing.pgm") + " " + Path("o.pgm")),
            kExitIo);
  EXPECT_EQ(RunBinary("decay --synthetic 1 --expect-slope -3"), kExitBenchmark);
}

}  // namespace
}  // namespace halftone::cli
