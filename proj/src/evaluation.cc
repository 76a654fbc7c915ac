#include "halftone/evaluation.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "halftone/error.h"
#include "halftone/numfmt.h"
#include "json.hpp"

namespace halftone::evaluation {
namespace {

using Complex = std::complex<double>;

// Fourier basis values e^{2 pi i k x / P} for x = i * step, laid out
// [i][k + K].
std::vector<Complex> Basis(int count, double step, int k_max, double period) {
  const int nk = 2 * k_max + 1;
  std::vector<Complex> out(static_cast<std::size_t>(count) * nk);
  for (int i = 0; i < count; ++i) {
    const double x = i * step;
    for (int k = -k_max; k <= k_max; ++k) {
      const double phase = 2.0 * std::numbers::pi * k * x / period;
      out[static_cast<std::size_t>(i) * nk + (k + k_max)] = std::polar(1.0, phase);
    }
  }
  return out;
}

void CheckLambda(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw ValidationError("oversampling rate must be finite and > 1");
  }
}

void CheckSpacing(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("lattice density must be finite and positive");
  }
}

void CheckKernel(const LowPassKernel& kernel) {
  if (!(kernel.scale > 0.0) || !std::isfinite(kernel.scale)) {
    throw ValidationError("low-pass kernel scale must be positive");
  }
}

bool Passes(int bin, int n, double lambda, double cutoff) {
  const int k = bin <= n / 2 ? bin : bin - n;
  return std::abs(k) * lambda / n <= cutoff * (1.0 + 1e-12);
}

std::vector<double> IdealLowPass1D(std::span<const double> values,
                                   double lambda, double cutoff) {
  const int n = static_cast<int>(values.size());
  std::vector<double> buffer(values.begin(), values.end());
  std::vector<fftw_complex> spectrum(n / 2 + 1);
  fftw_plan forward = fftw_plan_dft_r2c_1d(n, buffer.data(), spectrum.data(),
                                           FFTW_ESTIMATE);
  fftw_execute(forward);
  fftw_destroy_plan(forward);
  for (int k = 0; k <= n / 2; ++k) {
    if (!Passes(k, n, lambda, cutoff)) {
      spectrum[k][0] = 0.0;
      spectrum[k][1] = 0.0;
    }
  }
  fftw_plan backward = fftw_plan_dft_c2r_1d(n, spectrum.data(), buffer.data(),
                                            FFTW_ESTIMATE);
  fftw_execute(backward);
  fftw_destroy_plan(backward);
  for (double& x : buffer) x /= n;
  return buffer;
}

std::vector<double> IdealLowPass2D(std::span<const double> values, int width,
                                   int height, double lambda, double cutoff) {
  std::vector<double> buffer(values.begin(), values.end());
  const int half = width / 2 + 1;
  std::vector<fftw_complex> spectrum(static_cast<std::size_t>(height) * half);
  fftw_plan forward = fftw_plan_dft_r2c_2d(height, width, buffer.data(),
                                           spectrum.data(), FFTW_ESTIMATE);
  fftw_execute(forward);
  fftw_destroy_plan(forward);
  for (int r = 0; r < height; ++r) {
    const bool row_ok = Passes(r, height, lambda, cutoff);
    for (int c = 0; c < half; ++c) {
      if (row_ok && Passes(c, width, lambda, cutoff)) continue;
      auto& z = spectrum[static_cast<std::size_t>(r) * half + c];
      z[0] = 0.0;
      z[1] = 0.0;
    }
  }
  fftw_plan backward = fftw_plan_dft_c2r_2d(height, width, spectrum.data(),
                                            buffer.data(), FFTW_ESTIMATE);
  fftw_execute(backward);
  fftw_destroy_plan(backward);
  const double scale = 1.0 / (static_cast<double>(width) * height);
  for (double& x : buffer) x *= scale;
  return buffer;
}

std::vector<double> GaussianTaps(double lambda, double sigma) {
  const double reach = sigma * std::sqrt(2.0 * std::log(1e12));
  const int radius = static_cast<int>(std::floor(reach * lambda));
  std::vector<double> taps(2 * radius + 1);
  const double norm = 1.0 / (lambda * std::sqrt(2.0 * std::numbers::pi) * sigma);
  for (int j = -radius; j <= radius; ++j) {
    const double t = j / lambda;
    taps[j + radius] = norm * std::exp(-t * t / (2.0 * sigma * sigma));
  }
  return taps;
}

// out[i] = sum_j taps[j + R] * in[i - j] with in read as 0 outside.
void Convolve(const double* in, double* out, int n, std::ptrdiff_t stride,
              const std::vector<double>& taps) {
  const int radius = static_cast<int>(taps.size() / 2);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    const int j_lo = std::max(-radius, i - (n - 1));
    const int j_hi = std::min(radius, i);
    for (int j = j_lo; j <= j_hi; ++j) {
      acc += taps[j + radius] * in[(i - j) * stride];
    }
    out[i * stride] = acc;
  }
}

std::pair<int, int> InteriorRange(int n, double margin) {
  if (!(margin >= 0.0 && margin < 0.5)) {
    throw ValidationError("interior margin must lie in [0, 0.5)");
  }
  const int lo = static_cast<int>(std::ceil(margin * n - 1e-9));
  const int hi = std::min(
      n - 1, static_cast<int>(std::floor((1.0 - margin) * n + 1e-9)));
  if (lo > hi) throw ValidationError("interior region is empty");
  return {lo, hi};
}

void CheckLambdas(const std::vector<double>& lambdas) {
  if (lambdas.size() < 4) {
    throw ValidationError("decay experiment needs at least four lambdas");
  }
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!std::isfinite(lambdas[i]) || lambdas[i] <= 0.0) {
      throw ValidationError("lambdas must be positive and finite");
    }
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) {
      throw ValidationError("lambdas must be strictly increasing");
    }
  }
}

std::string LambdaText(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", lambda);
  return buf;
}

int SampleCount(double length, double lambda) {
  const long n = std::lround(length * lambda);
  if (n < 8) {
    throw ValidationError("window too short at lambda " + LambdaText(lambda));
  }
  return static_cast<int>(n);
}

double WindowLength(const BandlimitedSignal& signal,
                    const DecayOptions& options) {
  if (options.domain_length < 0.0) {
    throw ValidationError("domain length must be non-negative");
  }
  return options.domain_length > 0.0 ? options.domain_length
                                     : signal.period();
}

}  // namespace

BandlimitedSignal::BandlimitedSignal(int dims, int k_max,
                                     std::vector<Complex> coeffs)
    : dims_(dims),
      k_max_(k_max),
      period_(k_max > 0 ? 2.0 * k_max : 1.0),
      coeffs_(std::move(coeffs)) {
  if (dims_ != 1 && dims_ != 2) throw ValidationError("dims must be 1 or 2");
  if (k_max_ < 0) throw ValidationError("k_max must be non-negative");
  const std::size_t nk = 2 * k_max_ + 1;
  const std::size_t expected = dims_ == 1 ? nk : nk * nk;
  if (coeffs_.size() != expected) {
    throw ValidationError("coefficient count does not match k_max");
  }
  for (int k2 = (dims_ == 1 ? 0 : -k_max_); k2 <= (dims_ == 1 ? 0 : k_max_);
       ++k2) {
    for (int k1 = -k_max_; k1 <= k_max_; ++k1) {
      const Complex a = coeff(k1, k2);
      const Complex b = coeff(-k1, -k2);
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw ValidationError("coefficients must be finite");
      }
      if (std::abs(a - std::conj(b)) > 1e-12 * (1.0 + std::abs(a))) {
        throw ValidationError("coefficients are not conjugate symmetric");
      }
    }
  }
}

BandlimitedSignal BandlimitedSignal::Random(int dims, int k_max, double bound,
                                            std::uint64_t seed) {
  if (!(bound > 0.0 && bound <= 1.0)) {
    throw ValidationError("amplitude bound must lie in (0, 1]");
  }
  if (dims != 1 && dims != 2) throw ValidationError("dims must be 1 or 2");
  if (k_max < 0) throw ValidationError("k_max must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int nk = 2 * k_max + 1;
  const int k2_lo = dims == 1 ? 0 : -k_max;
  const int k2_hi = dims == 1 ? 0 : k_max;
  std::vector<Complex> c(static_cast<std::size_t>(nk) * (k2_hi - k2_lo + 1));
  auto slot = [&](int k1, int k2) -> Complex& {
    return c[static_cast<std::size_t>(k2 - k2_lo) * nk + (k1 + k_max)];
  };
  // Draw the upper half plane (k2 > 0, or k2 == 0 and k1 > 0), then mirror.
  for (int k2 = 0; k2 <= k2_hi; ++k2) {
    for (int k1 = (k2 == 0 ? 1 : -k_max); k1 <= k_max; ++k1) {
      const double re = normal(rng);
      const double im = normal(rng);
      slot(k1, k2) = {re, im};
      slot(-k1, -k2) = {re, -im};
    }
  }
  slot(0, 0) = {normal(rng), 0.0};
  if (k_max == 0) slot(0, 0) = {1.0, 0.0};

  BandlimitedSignal raw(dims, k_max, c);
  const double sup = raw.DenseSup();
  if (!(sup > 0.0)) throw NumericalError("random signal vanished");
  for (auto& z : c) z *= bound / sup;
  return BandlimitedSignal(dims, k_max, std::move(c));
}

Complex BandlimitedSignal::coeff(int k1, int k2) const {
  if (std::abs(k1) > k_max_ || std::abs(k2) > k_max_ ||
      (dims_ == 1 && k2 != 0)) {
    return {0.0, 0.0};
  }
  const std::size_t nk = 2 * k_max_ + 1;
  const std::size_t row = dims_ == 1 ? 0 : static_cast<std::size_t>(k2 + k_max_);
  return coeffs_[row * nk + (k1 + k_max_)];
}

double BandlimitedSignal::Evaluate(double x) const {
  if (dims_ != 1) throw ValidationError("signal is two-dimensional");
  Complex acc{0.0, 0.0};
  for (int k = -k_max_; k <= k_max_; ++k) {
    acc += coeff(k) * std::polar(1.0, 2.0 * std::numbers::pi * k * x / period_);
  }
  return acc.real();
}

double BandlimitedSignal::Evaluate(double x, double y) const {
  if (dims_ != 2) throw ValidationError("signal is one-dimensional");
  Complex acc{0.0, 0.0};
  for (int k2 = -k_max_; k2 <= k_max_; ++k2) {
    for (int k1 = -k_max_; k1 <= k_max_; ++k1) {
      const double phase =
          2.0 * std::numbers::pi * (k1 * x + k2 * y) / period_;
      acc += coeff(k1, k2) * std::polar(1.0, phase);
    }
  }
  return acc.real();
}

std::vector<double> BandlimitedSignal::EvaluateGrid(int count,
                                                    double step) const {
  if (count <= 0) throw ValidationError("grid count must be positive");
  const int nk = 2 * k_max_ + 1;
  const std::vector<Complex> basis = Basis(count, step, k_max_, period_);
  if (dims_ == 1) {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
      Complex acc{0.0, 0.0};
      for (int k = 0; k < nk; ++k) {
        acc += coeffs_[k] * basis[static_cast<std::size_t>(i) * nk + k];
      }
      out[i] = acc.real();
    }
    return out;
  }
  // partial[k2][i] = sum_k1 c(k1, k2) e^{2 pi i k1 x_i / P}
  std::vector<Complex> partial(static_cast<std::size_t>(nk) * count);
  for (int k2 = 0; k2 < nk; ++k2) {
    for (int i = 0; i < count; ++i) {
      Complex acc{0.0, 0.0};
      for (int k1 = 0; k1 < nk; ++k1) {
        acc += coeffs_[static_cast<std::size_t>(k2) * nk + k1] *
               basis[static_cast<std::size_t>(i) * nk + k1];
      }
      partial[static_cast<std::size_t>(k2) * count + i] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(count) * count);
  for (int j = 0; j < count; ++j) {
    for (int i = 0; i < count; ++i) {
      Complex acc{0.0, 0.0};
      for (int k2 = 0; k2 < nk; ++k2) {
        acc += basis[static_cast<std::size_t>(j) * nk + k2] *
               partial[static_cast<std::size_t>(k2) * count + i];
      }
      out[static_cast<std::size_t>(j) * count + i] = acc.real();
    }
  }
  return out;
}

double BandlimitedSignal::DenseSup() const {
  const int count = static_cast<int>(std::lround(period_ * 16.0));
  double sup = 0.0;
  for (double v : EvaluateGrid(count, 1.0 / 16.0)) sup = std::max(sup, std::abs(v));
  return sup;
}

std::vector<double> Sample1D(const BandlimitedSignal& signal, double lambda,
                             int count) {
  CheckLambda(lambda);
  if (signal.dims() != 1) throw ValidationError("expected a 1D signal");
  return signal.EvaluateGrid(count, 1.0 / lambda);
}

SignedImage Sample2D(const BandlimitedSignal& signal, double lambda,
                     int count) {
  CheckLambda(lambda);
  if (signal.dims() != 2) throw ValidationError("expected a 2D signal");
  std::vector<double> values = signal.EvaluateGrid(count, 1.0 / lambda);
  for (double& v : values) v = std::clamp(v, -1.0, 1.0);
  return SignedImage(count, count, std::move(values));
}

LowPassKernel LowPassKernel::Ideal(double cutoff) {
  LowPassKernel k{Kind::kIdeal, cutoff};
  CheckKernel(k);
  return k;
}

LowPassKernel LowPassKernel::Gaussian(double sigma) {
  LowPassKernel k{Kind::kGaussian, sigma};
  CheckKernel(k);
  return k;
}

LowPassKernel LowPassKernel::Parse(const std::string& kind, double scale) {
  if (kind == "ideal") return Ideal(scale);
  if (kind == "gaussian") return Gaussian(scale);
  throw ValidationError("unknown kernel '" + kind +
                        "' (expected ideal or gaussian)");
}

std::string LowPassKernel::name() const {
  return kind == Kind::kIdeal ? "ideal" : "gaussian";
}

std::vector<double> Reconstruct1D(std::span<const double> values,
                                  double lambda, const LowPassKernel& kernel) {
  CheckSpacing(lambda);
  CheckKernel(kernel);
  if (values.empty()) return {};
  if (kernel.kind == LowPassKernel::Kind::kIdeal) {
    return IdealLowPass1D(values, lambda, kernel.scale);
  }
  std::vector<double> out(values.size());
  Convolve(values.data(), out.data(), static_cast<int>(values.size()), 1,
           GaussianTaps(lambda, kernel.scale));
  return out;
}

std::vector<double> Reconstruct2D(std::span<const double> values, int width,
                                  int height, double lambda,
                                  const LowPassKernel& kernel) {
  CheckSpacing(lambda);
  CheckKernel(kernel);
  if (width <= 0 || height <= 0 ||
      values.size() != static_cast<std::size_t>(width) * height) {
    throw ValidationError("grid shape does not match value count");
  }
  if (kernel.kind == LowPassKernel::Kind::kIdeal) {
    return IdealLowPass2D(values, width, height, lambda, kernel.scale);
  }
  const std::vector<double> taps = GaussianTaps(lambda, kernel.scale);
  std::vector<double> rows(values.size());
  for (int r = 0; r < height; ++r) {
    const std::size_t off = static_cast<std::size_t>(r) * width;
    Convolve(values.data() + off, rows.data() + off, width, 1, taps);
  }
  std::vector<double> out(values.size());
  for (int c = 0; c < width; ++c) {
    Convolve(rows.data() + c, out.data() + c, height, width, taps);
  }
  return out;
}

double QuantizationError1D(std::span<const double> samples,
                           std::span<const double> q, double lambda,
                           const LowPassKernel& kernel, double margin) {
  if (samples.size() != q.size()) {
    throw ValidationError("sample and quantized lengths differ");
  }
  const int n = static_cast<int>(samples.size());
  const auto [lo, hi] = InteriorRange(n, margin);
  std::vector<double> diff(samples.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = samples[i] - q[i];
  const std::vector<double> rec = Reconstruct1D(diff, lambda, kernel);
  double sup = 0.0;
  for (int i = lo; i <= hi; ++i) sup = std::max(sup, std::abs(rec[i]));
  return sup;
}

double QuantizationError2D(const SignedImage& samples, const BinaryImage& q,
                           double lambda, const LowPassKernel& kernel,
                           double margin) {
  if (samples.width() != q.width() || samples.height() != q.height()) {
    throw ValidationError("sample and quantized grids differ in size");
  }
  const int w = samples.width();
  const int h = samples.height();
  const auto [row_lo, row_hi] = InteriorRange(h, margin);
  const auto [col_lo, col_hi] = InteriorRange(w, margin);
  std::vector<double> diff(samples.size());
  const auto p = samples.values();
  const auto qv = q.values();
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = p[i] - qv[i];
  const std::vector<double> rec = Reconstruct2D(diff, w, h, lambda, kernel);
  double sup = 0.0;
  for (int r = row_lo; r <= row_hi; ++r) {
    for (int c = col_lo; c <= col_hi; ++c) {
      sup = std::max(sup, std::abs(rec[static_cast<std::size_t>(r) * w + c]));
    }
  }
  return sup;
}

double LowPassImageError(const GrayImage& a, const GrayImage& b,
                         const LowPassKernel& kernel, double margin) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ValidationError("images differ in size");
  }
  const int w = a.width();
  const int h = a.height();
  const auto [row_lo, row_hi] = InteriorRange(h, margin);
  const auto [col_lo, col_hi] = InteriorRange(w, margin);
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = a.values()[i] - b.values()[i];
  }
  const std::vector<double> rec = Reconstruct2D(diff, w, h, 1.0, kernel);
  double sup = 0.0;
  for (int r = row_lo; r <= row_hi; ++r) {
    for (int c = col_lo; c <= col_hi; ++c) {
      sup = std::max(sup, std::abs(rec[static_cast<std::size_t>(r) * w + c]));
    }
  }
  return sup;
}

double FitLogLogSlope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("slope fit needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw ValidationError("log-log fit needs positive values");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) {
    throw ValidationError("slope fit needs distinct abscissae");
  }
  return (n * sxy - sx * sy) / den;
}

DecayReport MakeDecayReport(std::vector<double> lambdas,
                            std::vector<double> errors) {
  CheckLambdas(lambdas);
  if (errors.size() != lambdas.size()) {
    throw ValidationError("one error per lambda is required");
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!std::isfinite(errors[i])) {
      throw NumericalError("non-finite error at lambda " +
                           LambdaText(lambdas[i]));
    }
    if (!(errors[i] > 0.0)) {
      throw NumericalError("zero error at lambda " + LambdaText(lambdas[i]) +
                           " leaves the slope undefined");
    }
  }
  DecayReport report;
  report.fitted_slope = FitLogLogSlope(lambdas, errors);
  report.lambdas = std::move(lambdas);
  report.errors = std::move(errors);
  return report;
}

std::string DecayReport::ToJson() const {
  nlohmann::ordered_json j;
  auto rounded = [](const std::vector<double>& xs) {
    std::vector<double> out;
    for (double x : xs) out.push_back(RoundSignificant(x, 12));
    return out;
  };
  j["lambdas"] = lambdas;
  j["errors"] = rounded(errors);
  j["fitted_slope"] = RoundSignificant(fitted_slope, 12);
  if (!v_max_abs.empty()) j["v_max_abs"] = rounded(v_max_abs);
  return j.dump(2);
}

std::string DecayReport::ToCsv() const {
  std::ostringstream os;
  os << "lambda,error,v_max_abs\n";
  char buf[96];
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double v = i < v_max_abs.size() ? v_max_abs[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", lambdas[i],
                  errors[i], v);
    os << buf;
  }
  return os.str();
}

DecayReport DecayExperiment1D(const BandlimitedSignal& signal,
                              const diffusion::FeedbackFilter& filter,
                              const DecayOptions& options) {
  CheckLambdas(options.lambdas);
  if (signal.dims() != 1) throw ValidationError("expected a 1D signal");
  const double length = WindowLength(signal, options);
  std::vector<double> errors;
  std::vector<double> vmax;
  for (double lambda : options.lambdas) {
    const std::vector<double> p =
        Sample1D(signal, lambda, SampleCount(length, lambda));
    const auto sd = diffusion::SigmaDelta1D(p, filter);
    const std::vector<double> q(sd.q.begin(), sd.q.end());
    const double e =
        QuantizationError1D(p, q, lambda, options.kernel, options.margin);
    if (!std::isfinite(e) || !std::isfinite(sd.v_max_abs)) {
      throw NumericalError("non-finite error at lambda " + LambdaText(lambda));
    }
    errors.push_back(e);
    vmax.push_back(sd.v_max_abs);
  }
  DecayReport report = MakeDecayReport(options.lambdas, std::move(errors));
  report.v_max_abs = std::move(vmax);
  return report;
}

DecayReport DecayExperiment2D(const BandlimitedSignal& signal,
                              const diffusion::SchemeSpec& scheme,
                              diffusion::ScanOrder scan,
                              const DecayOptions& options) {
  CheckLambdas(options.lambdas);
  if (signal.dims() != 2) throw ValidationError("expected a 2D signal");
  const double length = WindowLength(signal, options);
  std::vector<double> errors;
  std::vector<double> vmax;
  for (double lambda : options.lambdas) {
    const SignedImage p = Sample2D(signal, lambda, SampleCount(length, lambda));
    const auto run = diffusion::RunScheme(p, scheme, scan);
    const double e =
        QuantizationError2D(p, run.q, lambda, options.kernel, options.margin);
    if (!std::isfinite(e) || !std::isfinite(run.v_max_abs)) {
      throw NumericalError("non-finite error at lambda " + LambdaText(lambda));
    }
    errors.push_back(e);
    vmax.push_back(run.v_max_abs);
  }
  DecayReport report = MakeDecayReport(options.lambdas, std::move(errors));
  report.v_max_abs = std::move(vmax);
  return report;
}

}  // namespace halftone::evaluation
