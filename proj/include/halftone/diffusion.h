#ifndef HALFTONE_DIFFUSION_H_
#define HALFTONE_DIFFUSION_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "halftone/image.h"
#include "halftone/scheme.h"

namespace halftone::diffusion {

enum class ScanOrder { kRaster, kSerpentine };

std::string_view ScanName(ScanOrder scan);
// "raster" or "serpentine"; throws ValidationError otherwise.
ScanOrder ParseScanOrder(std::string_view name);

// sign(x) = -1 for x <= 0, +1 for x > 0.
inline double Quantize(double x) { return x > 0.0 ? 1.0 : -1.0; }

struct HalftoneResult {
  BinaryImage q;
  std::vector<double> v_final;  // row-major, same shape as q
  double v_max_abs = 0.0;
  std::string scheme;
  ScanOrder scan = ScanOrder::kRaster;
};

// Classic Floyd-Steinberg written as a single straight-line recurrence.
HalftoneResult RunFloydSteinbergDirect(const SignedImage& p);

// Generic weighted Sigma-Delta engine. State outside the grid reads as 0.
// Serpentine scans visit odd rows right to left with every dj mirrored.
HalftoneResult RunScheme(const SignedImage& p, const SchemeSpec& scheme,
                         ScanOrder scan = ScanOrder::kRaster);

// p * (1 - margin); requires 0 < margin < 1.
SignedImage Rescale(const SignedImage& p, double margin = 0.03);

struct SigmaDeltaResult {
  std::vector<int8_t> q;
  std::vector<double> v;
  double v_max_abs = 0.0;
};

// One-dimensional recurrence v_n = (h * v)_n + y_n - q_n with
// q_n = sign((h * v)_n + y_n) and v_n = 0 for n < 0.
SigmaDeltaResult SigmaDelta1D(std::span<const double> samples,
                              const FeedbackFilter& filter);

}  // namespace halftone::diffusion

#endif  // HALFTONE_DIFFUSION_H_
