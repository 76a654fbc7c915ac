#include "halftone/diffusion.h"

#include <algorithm>
#include <cmath>

#include "halftone/error.h"

namespace halftone::diffusion {
namespace {

struct Tap {
  int di;
  int dj;
  double coeff;
};

std::vector<Tap> FlattenTaps(const SchemeSpec& scheme) {
  std::vector<Tap> taps;
  for (const auto& e : scheme.entries()) {
    const auto h = e.filter.taps();
    for (std::size_t k = 0; k < h.size(); ++k) {
      if (h[k].numerator() == 0) continue;
      const int step = static_cast<int>(k + 1);
      taps.push_back({e.direction.di * step, e.direction.dj * step,
                      boost::rational_cast<double>(e.weight * h[k])});
    }
  }
  return taps;
}

double MaxAbs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::string_view ScanName(ScanOrder scan) {
  return scan == ScanOrder::kRaster ? "raster" : "serpentine";
}

ScanOrder ParseScanOrder(std::string_view name) {
  if (name == "raster") return ScanOrder::kRaster;
  if (name == "serpentine") return ScanOrder::kSerpentine;
  throw ValidationError("unknown scan order '" + std::string(name) +
                        "' (expected raster or serpentine)");
}

HalftoneResult RunFloydSteinbergDirect(const SignedImage& p) {
  const int h = p.height();
  const int w = p.width();
  std::vector<double> v(p.size(), 0.0);
  std::vector<int8_t> q(p.size(), 0);
  auto at = [&](int m, int n) -> double {
    if (m < 0 || n < 0 || n >= w) return 0.0;
    return v[static_cast<std::size_t>(m) * w + n];
  };
  for (int m = 0; m < h; ++m) {
    for (int n = 0; n < w; ++n) {
      const double s = 5.0 / 16.0 * at(m - 1, n) + 7.0 / 16.0 * at(m, n - 1) +
                       1.0 / 16.0 * at(m - 1, n - 1) +
                       3.0 / 16.0 * at(m - 1, n + 1);
      const double x = s + p.at(m, n);
      const double qn = Quantize(x);
      const std::size_t i = static_cast<std::size_t>(m) * w + n;
      q[i] = static_cast<int8_t>(qn);
      v[i] = x - qn;
    }
  }
  HalftoneResult out{BinaryImage(w, h, std::move(q)), std::move(v), 0.0,
                     "fs-direct", ScanOrder::kRaster};
  out.v_max_abs = MaxAbs(out.v_final);
  return out;
}

HalftoneResult RunScheme(const SignedImage& p, const SchemeSpec& scheme,
                         ScanOrder scan) {
  const int h = p.height();
  const int w = p.width();
  const std::vector<Tap> taps = FlattenTaps(scheme);
  std::vector<double> v(p.size(), 0.0);
  std::vector<int8_t> q(p.size(), 0);

  for (int m = 0; m < h; ++m) {
    const bool reversed = scan == ScanOrder::kSerpentine && (m % 2 == 1);
    for (int step = 0; step < w; ++step) {
      const int n = reversed ? w - 1 - step : step;
      double s = 0.0;
      for (const Tap& t : taps) {
        const int mm = m - t.di;
        const int nn = reversed ? n + t.dj : n - t.dj;
        if (mm < 0 || nn < 0 || nn >= w) continue;
        s += t.coeff * v[static_cast<std::size_t>(mm) * w + nn];
      }
      const double x = s + p.at(m, n);
      const double qn = Quantize(x);
      const std::size_t i = static_cast<std::size_t>(m) * w + n;
      q[i] = static_cast<int8_t>(qn);
      v[i] = x - qn;
    }
  }
  HalftoneResult out{BinaryImage(w, h, std::move(q)), std::move(v), 0.0,
                     scheme.name(), scan};
  out.v_max_abs = MaxAbs(out.v_final);
  return out;
}

SignedImage Rescale(const SignedImage& p, double margin) {
  if (!(margin > 0.0 && margin < 1.0)) {
    throw ValidationError("rescale margin must lie in (0,1)");
  }
  std::vector<double> values(p.values().begin(), p.values().end());
  for (double& x : values) x *= 1.0 - margin;
  return SignedImage(p.width(), p.height(), std::move(values));
}

SigmaDeltaResult SigmaDelta1D(std::span<const double> samples,
                              const FeedbackFilter& filter) {
  const std::vector<double> h = filter.TapsAsDouble();
  SigmaDeltaResult out;
  out.q.resize(samples.size());
  out.v.resize(samples.size());
  for (std::size_t n = 0; n < samples.size(); ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k < h.size() && k < n; ++k) {
      s += h[k] * out.v[n - 1 - k];
    }
    const double x = s + samples[n];
    const double qn = Quantize(x);
    out.q[n] = static_cast<int8_t>(qn);
    out.v[n] = x - qn;
    out.v_max_abs = std::max(out.v_max_abs, std::abs(out.v[n]));
  }
  return out;
}

}  // namespace halftone::diffusion
