#ifndef HALFTONE_EVALUATION_H_
#define HALFTONE_EVALUATION_H_

// Bandlimited test signals, low-pass reconstruction and the oversampling
// decay benchmark for Sigma-Delta quantizers.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "halftone/diffusion.h"
#include "halftone/image.h"
#include "halftone/scheme.h"

namespace halftone::evaluation {

// Real trigonometric polynomial with integer frequencies |k|_inf <= K and
// period P = 2K (P = 1 when K = 0), so every frequency k/P lies in
// [-1/2, 1/2]^dims.
class BandlimitedSignal {
 public:
  // 1D: coeffs[k + K] for k in [-K, K].
  // 2D: coeffs[(k2 + K) * (2K + 1) + (k1 + K)], k1 along x.
  // Throws ValidationError unless the coefficients are conjugate symmetric.
  BandlimitedSignal(int dims, int k_max, std::vector<std::complex<double>> coeffs);

  // Gaussian coefficients from mt19937_64(seed), scaled so that the sup
  // over the 16x oversampled grid equals `bound`.
  static BandlimitedSignal Random(int dims, int k_max, double bound,
                                  std::uint64_t seed);

  int dims() const { return dims_; }
  int k_max() const { return k_max_; }
  double period() const { return period_; }
  std::span<const std::complex<double>> coeffs() const { return coeffs_; }
  std::complex<double> coeff(int k1, int k2 = 0) const;

  double Evaluate(double x) const;
  double Evaluate(double x, double y) const;

  // Values on a grid of `count` points per axis at spacing `step`, starting
  // at the origin; 2D results are row-major with y along rows.
  std::vector<double> EvaluateGrid(int count, double step) const;

  // max |w| over one period sampled at spacing 1/16.
  double DenseSup() const;

 private:
  int dims_;
  int k_max_;
  double period_;
  std::vector<std::complex<double>> coeffs_;
};

// w(n / lambda) for n = 0..count-1.
std::vector<double> Sample1D(const BandlimitedSignal& signal, double lambda,
                             int count);
// Pixel (r, c) holds w(c / lambda, r / lambda). Values beyond [-1, 1] by
// rounding are clamped.
SignedImage Sample2D(const BandlimitedSignal& signal, double lambda, int count);

struct LowPassKernel {
  enum class Kind { kIdeal, kGaussian };
  Kind kind = Kind::kIdeal;
  // Ideal: cutoff frequency in cycles per unit length.
  // Gaussian: standard deviation in units of length.
  double scale = 0.5;

  static LowPassKernel Ideal(double cutoff = 0.5);
  static LowPassKernel Gaussian(double sigma = 1.0);
  static LowPassKernel Parse(const std::string& kind, double scale);
  std::string name() const;
};

// (1/lambda^d) sum_n x_n Phi(t - n/lambda) evaluated on the sample lattice
// (any lambda > 0).
// Ideal: the window is treated as one period and discrete Fourier bins with
// |frequency| > cutoff are removed. Gaussian: direct convolution, zero
// outside the window, taps dropped below 1e-12 of the peak.
std::vector<double> Reconstruct1D(std::span<const double> values,
                                  double lambda, const LowPassKernel& kernel);
std::vector<double> Reconstruct2D(std::span<const double> values, int width,
                                  int height, double lambda,
                                  const LowPassKernel& kernel);

// Sup of |reconstruct(samples) - reconstruct(q)| over lattice indices in
// [margin * N, (1 - margin) * N] on every axis.
double QuantizationError1D(std::span<const double> samples,
                           std::span<const double> q, double lambda,
                           const LowPassKernel& kernel, double margin = 0.1);
double QuantizationError2D(const SignedImage& samples, const BinaryImage& q,
                           double lambda, const LowPassKernel& kernel,
                           double margin = 0.1);

// Same measurement for two gray images on the unit pixel lattice: sup over
// the interior of |Phi * (a - b)| in gray-level units.
double LowPassImageError(const GrayImage& a, const GrayImage& b,
                         const LowPassKernel& kernel, double margin = 0.1);

// Least-squares slope of log(y) against log(x).
double FitLogLogSlope(std::span<const double> x, std::span<const double> y);

struct DecayReport {
  std::vector<double> lambdas;
  std::vector<double> errors;
  std::vector<double> v_max_abs;  // one per lambda; empty for synthetic data
  double fitted_slope = 0.0;

  std::string ToJson() const;
  std::string ToCsv() const;
};

// Builds a report from given errors (validated like an experiment).
DecayReport MakeDecayReport(std::vector<double> lambdas,
                            std::vector<double> errors);

struct DecayOptions {
  std::vector<double> lambdas;
  LowPassKernel kernel;
  double margin = 0.1;
  // Length of the sampled window per axis; 0 selects one signal period.
  double domain_length = 0.0;
};

// Throws ValidationError for fewer than four or non-increasing lambdas,
// NumericalError naming lambda when an error is not finite.
DecayReport DecayExperiment1D(const BandlimitedSignal& signal,
                              const diffusion::FeedbackFilter& filter,
                              const DecayOptions& options);
DecayReport DecayExperiment2D(const BandlimitedSignal& signal,
                              const diffusion::SchemeSpec& scheme,
                              diffusion::ScanOrder scan,
                              const DecayOptions& options);

}  // namespace halftone::evaluation

#endif  // HALFTONE_EVALUATION_H_
