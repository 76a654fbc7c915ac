#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <random>
#include <vector>

#include "halftone/diffusion.h"
#include "halftone/error.h"
#include "halftone/image.h"
#include "halftone/scheme.h"

namespace halftone::diffusion {
namespace {

SignedImage RandomSigned(int width, int height, unsigned seed,
                         double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<double> v(static_cast<std::size_t>(width) * height);
  for (double& x : v) x = u(rng);
  return SignedImage(width, height, v);
}

const SchemeSpec& Builtin(const char* name) {
  static std::map<std::string, SchemeSpec> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, *FindBuiltinScheme(name)).first;
  return it->second;
}

TEST(Quantize, SignOfZeroIsBlack) {
  EXPECT_EQ(Quantize(0.0), -1.0);
  EXPECT_EQ(Quantize(-0.0), -1.0);
  EXPECT_EQ(Quantize(1e-300), 1.0);
  EXPECT_EQ(Quantize(-3.0), -1.0);
}

TEST(FloydSteinbergDirect, ConstantWhiteAndBlack) {
  for (double c : {1.0, -1.0}) {
    const auto r = RunFloydSteinbergDirect(SignedImage::Filled(9, 7, c));
    for (auto q : r.q.values()) EXPECT_EQ(q, c);
    for (double v : r.v_final) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(r.v_max_abs, 0.0);
  }
}

TEST(FloydSteinbergDirect, ZeroImageMatchesHandSteppedOracle) {
  // Written out cell by cell for a 4x4 zero input.
  const int n = 4;
  double v[n][n] = {};
  int q[n][n] = {};
  auto V = [&](int m, int k) { return (m < 0 || k < 0 || k >= n) ? 0.0 : v[m][k]; };
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      const double s = 0.3125 * V(m - 1, k) + 0.4375 * V(m, k - 1) +
                       0.0625 * V(m - 1, k - 1) + 0.1875 * V(m - 1, k + 1);
      q[m][k] = s > 0 ? 1 : -1;
      v[m][k] = s - q[m][k];
    }
  }
  const auto r = RunFloydSteinbergDirect(SignedImage::Filled(n, n, 0.0));
  EXPECT_EQ(r.q.at(0, 0), -1);
  EXPECT_EQ(r.v_final[0], 1.0);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      EXPECT_EQ(r.q.at(m, k), q[m][k]) << m << "," << k;
      EXPECT_DOUBLE_EQ(r.v_final[m * n + k], v[m][k]) << m << "," << k;
    }
  }
}

TEST(RunScheme, FloydSteinbergMatchesDirectBitExactly) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const SignedImage p = RandomSigned(64, 64, seed);
    const auto a = RunScheme(p, Builtin("fs1"));
    const auto b = RunFloydSteinbergDirect(p);
    ASSERT_EQ(a.q, b.q) << seed;
    ASSERT_EQ(a.v_final, b.v_final) << seed;
  }
}

TEST(RunScheme, SingleDirectionAlternates) {
  const SchemeSpec row("row", {{{0, 1}, Rational(1), FeedbackFilter::FirstOrder()}}, 1);
  const auto r = RunScheme(SignedImage::Filled(9, 1, 0.0), row);
  for (int k = 0; k < 9; ++k) {
    EXPECT_EQ(r.q.at(0, k), k % 2 == 0 ? -1 : 1);
    EXPECT_EQ(r.v_final[k], k % 2 == 0 ? 1.0 : 0.0);
  }
}

TEST(RunScheme, FixedPointsForEveryScheme) {
  for (const auto& s : BuiltinSchemes()) {
    for (ScanOrder scan : {ScanOrder::kRaster, ScanOrder::kSerpentine}) {
      for (double c : {1.0, -1.0}) {
        const auto r = RunScheme(SignedImage::Filled(17, 11, c), s, scan);
        for (auto q : r.q.values()) ASSERT_EQ(q, c) << s.name();
        EXPECT_EQ(r.v_max_abs, 0.0) << s.name();
      }
    }
  }
}

TEST(RunScheme, FirstOrderStateBound) {
  for (const char* name : {"fs1", "shiau-fan", "jjn"}) {
    for (unsigned seed = 0; seed < 10; ++seed) {
      for (ScanOrder scan : {ScanOrder::kRaster, ScanOrder::kSerpentine}) {
        const auto r = RunScheme(RandomSigned(40, 30, seed), Builtin(name), scan);
        EXPECT_LE(r.v_max_abs, 1.0 + 1e-12) << name << " seed " << seed;
      }
    }
  }
}

TEST(RunScheme, ConservationPerPixel) {
  // v - s = p - q where s is recomputed from the stored state.
  const SignedImage p = RandomSigned(23, 19, 5, 0.9);
  const SchemeSpec& s = Builtin("fs2-33");
  const auto r = RunScheme(p, s);
  const int w = p.width();
  for (int m = 0; m < p.height(); ++m) {
    for (int n = 0; n < w; ++n) {
      double sum = 0.0;
      for (const auto& e : s.entries()) {
        const auto taps = e.filter.TapsAsDouble();
        double conv = 0.0;
        for (std::size_t k = 0; k < taps.size(); ++k) {
          const int mm = m - e.direction.di * static_cast<int>(k + 1);
          const int nn = n - e.direction.dj * static_cast<int>(k + 1);
          if (mm < 0 || nn < 0 || nn >= w) continue;
          conv += taps[k] * r.v_final[mm * w + nn];
        }
        sum += boost::rational_cast<double>(e.weight) * conv;
      }
      const double lhs = r.v_final[m * w + n] - sum;
      EXPECT_NEAR(lhs, p.at(m, n) - r.q.at(m, n), 1e-12);
    }
  }
}

TEST(RunScheme, SerpentineMirrorsOddRows) {
  // Mirroring the image left-right turns serpentine into a raster scan of a
  // mirrored scheme on even rows; check the first two rows directly.
  const SignedImage p = RandomSigned(12, 2, 9);
  const auto serp = RunScheme(p, Builtin("fs1"), ScanOrder::kSerpentine);
  const auto rast = RunScheme(p, Builtin("fs1"), ScanOrder::kRaster);
  for (int n = 0; n < 12; ++n) EXPECT_EQ(serp.q.at(0, n), rast.q.at(0, n));
  // Odd row: the first visited pixel is the rightmost one, whose only
  // written neighbours are above and above-left (weights 5/16 and 3/16).
  const double s = 5.0 / 16.0 * serp.v_final[11] + 3.0 / 16.0 * serp.v_final[10];
  EXPECT_EQ(serp.q.at(1, 11), Quantize(s + p.at(1, 11)));
  EXPECT_EQ(serp.scan, ScanOrder::kSerpentine);
  EXPECT_EQ(ScanName(ScanOrder::kSerpentine), "serpentine");
  EXPECT_EQ(ParseScanOrder("raster"), ScanOrder::kRaster);
  EXPECT_THROW(ParseScanOrder("zigzag"), ValidationError);
}

TEST(RunScheme, Deterministic) {
  const SignedImage p = RandomSigned(31, 29, 12, 0.97);
  const auto a = RunScheme(p, Builtin("jjn2-33"), ScanOrder::kSerpentine);
  const auto b = RunScheme(p, Builtin("jjn2-33"), ScanOrder::kSerpentine);
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.v_final, b.v_final);
}

TEST(RunScheme, MeanPreservation) {
  for (double c : {-0.5, 0.0, 0.5}) {
    const auto r = RunScheme(SignedImage::Filled(64, 64, c), Builtin("fs1"));
    double mean = 0.0;
    for (auto q : r.q.values()) mean += q;
    mean /= r.q.size();
    EXPECT_LE(std::abs(mean - c), 4.0 / 64.0) << c;
  }
}

TEST(Rescale, Examples) {
  const SignedImage p(3, 1, {1.0, 0.0, -0.5});
  const SignedImage r = Rescale(p, 0.03);
  EXPECT_DOUBLE_EQ(r.at(0, 0), 0.97);
  EXPECT_EQ(r.at(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(r.at(0, 2), -0.485);
  EXPECT_THROW(Rescale(p, 0.0), ValidationError);
  EXPECT_THROW(Rescale(p, 1.0), ValidationError);
}

TEST(Rescale, ScalesMaximum) {
  const SignedImage p = RandomSigned(16, 16, 3);
  double before = 0.0, after = 0.0;
  const SignedImage r = Rescale(p, 0.1);
  for (double v : p.values()) before = std::max(before, std::abs(v));
  for (double v : r.values()) after = std::max(after, std::abs(v));
  EXPECT_NEAR(after, 0.9 * before, 1e-15);
}

TEST(SigmaDelta1D, FirstOrderRecurrence) {
  const std::vector<double> y{0.0, 0.0, 0.0, 0.0, 0.3, -0.7};
  const auto r = SigmaDelta1D(y, FeedbackFilter::FirstOrder());
  double v = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double q = v + y[n] > 0 ? 1.0 : -1.0;
    v = v + y[n] - q;
    EXPECT_EQ(r.q[n], q);
    EXPECT_DOUBLE_EQ(r.v[n], v);
  }
}

TEST(SigmaDelta1D, SecondOrderStaysBounded) {
  std::vector<double> y(5000);
  for (std::size_t n = 0; n < y.size(); ++n) y[n] = 0.8 * std::sin(0.01 * n);
  const auto r = SigmaDelta1D(y, FeedbackFilter::H2());
  EXPECT_TRUE(std::isfinite(r.v_max_abs));
  EXPECT_LT(r.v_max_abs, 20.0);
}

}  // namespace
}  // namespace halftone::diffusion
