#include "halftone/rkhs.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <utility>

#include "halftone/error.h"
#include "halftone/numfmt.h"
#include "json.hpp"

namespace halftone::rkhs {
namespace {

using Complex = std::complex<double>;

void RequirePositiveDefinite(const RadialKernel& kernel) {
  if (!kernel.positive_definite()) {
    throw ValidationError(
        "quadrature quantities need a positive definite kernel");
  }
}

}  // namespace

RadialKernel RadialKernel::Gaussian(double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("gaussian sigma must be positive");
  return RadialKernel(Profile::kGaussian, sigma);
}

RadialKernel RadialKernel::NegativeDistance() {
  return RadialKernel(Profile::kNegativeDistance, 0.0);
}

double RadialKernel::operator()(const Point& a, const Point& b) const {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  if (profile_ == Profile::kGaussian) {
    return std::exp(-(dx * dx + dy * dy) / (sigma_ * sigma_));
  }
  return -std::hypot(dx, dy);
}

DiscreteMeasure::DiscreteMeasure(std::vector<Point> support,
                                 std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.size() != weights_.size()) {
    throw ValidationError("measure support and weights differ in length");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("measure weights must be finite and nonnegative");
    }
  }
}

DiscreteMeasure DiscreteMeasure::FromImage(const GrayImage& image) {
  std::vector<Point> support;
  std::vector<double> weights;
  support.reserve(image.size());
  weights.reserve(image.size());
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      support.push_back({c + 1.0, r + 1.0});
      weights.push_back(1.0 - image.at(r, c));
    }
  }
  return DiscreteMeasure(std::move(support), std::move(weights));
}

double DiscreteMeasure::TotalMass() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

FourierKernel FourierKernel::Default(int bandwidth) {
  if (bandwidth < 0) throw ValidationError("bandwidth must be nonnegative");
  std::vector<double> coeffs;
  for (int l2 = -bandwidth; l2 <= bandwidth; ++l2) {
    for (int l1 = -bandwidth; l1 <= bandwidth; ++l1) {
      coeffs.push_back(std::pow(1.0 + l1 * l1 + l2 * l2, -1.5));
    }
  }
  return FourierKernel(bandwidth, std::move(coeffs));
}

FourierKernel::FourierKernel(int bandwidth, std::vector<double> coeffs)
    : bandwidth_(bandwidth), coeffs_(std::move(coeffs)) {
  if (bandwidth_ < 0 || coeffs_.size() != Side() * Side()) {
    throw ValidationError("fourier kernel needs (2N+1)^2 coefficients");
  }
  for (int l2 = -bandwidth_; l2 <= bandwidth_; ++l2) {
    for (int l1 = -bandwidth_; l1 <= bandwidth_; ++l1) {
      if (!(coeff(l1, l2) > 0.0)) {
        throw ValidationError("fourier kernel coefficients must be positive");
      }
      if (coeff(l1, l2) != coeff(-l1, -l2)) {
        throw ValidationError("fourier kernel coefficients must satisfy "
                              "lambda_l = lambda_-l");
      }
    }
  }
}

double KernelEnergy(std::span<const Point> dots,
                    const DiscreteMeasure& image_measure,
                    const RadialKernel& kernel, double lambda) {
  double self = 0.0;
  for (const Point& a : dots) {
    for (const Point& b : dots) self += kernel(a, b);
  }
  double cross = 0.0;
  const auto support = image_measure.support();
  const auto weights = image_measure.weights();
  for (const Point& p : dots) {
    for (std::size_t x = 0; x < support.size(); ++x) {
      if (weights[x] != 0.0) cross += weights[x] * kernel(p, support[x]);
    }
  }
  return 0.5 * lambda * self - cross;
}

double HwNormSquared(const DiscreteMeasure& image_measure,
                     const RadialKernel& kernel) {
  RequirePositiveDefinite(kernel);
  const auto support = image_measure.support();
  const auto weights = image_measure.weights();
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (weights[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < support.size(); ++j) {
      if (weights[j] != 0.0) row += weights[j] * kernel(support[i], support[j]);
    }
    total += weights[i] * row;
  }
  if (total < -1e-10) {
    throw NumericalError("|h_w|^2 = " + std::to_string(total) +
                         " is negative; kernel is not positive definite");
  }
  return std::max(total, 0.0);
}

double QuadratureError(std::span<const Point> dots,
                       const DiscreteMeasure& image_measure,
                       const RadialKernel& kernel, double lambda) {
  RequirePositiveDefinite(kernel);
  const double err2 = 2.0 * lambda * KernelEnergy(dots, image_measure, kernel, lambda) +
                      HwNormSquared(image_measure, kernel);
  if (err2 < -1e-8) {
    throw NumericalError("squared quadrature error " + std::to_string(err2) +
                         " is negative beyond rounding");
  }
  return std::sqrt(std::max(err2, 0.0));
}

Point ToTorus(const Point& p, int width, int height) {
  return {(p.x - 0.5) / width, (p.y - 0.5) / height};
}

double FourierDiscrepancy(std::span<const Point> dots, const GrayImage& image,
                          const FourierKernel& kernel, double lambda) {
  const int width = image.width();
  const int height = image.height();
  const std::size_t n = image.size();

  fftw_complex* buf = fftw_alloc_complex(n);
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = 1.0 - image.values()[i];
    buf[i][1] = 0.0;
  }
  fftw_plan plan =
      fftw_plan_dft_2d(height, width, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  auto mod = [](int a, int m) { return ((a % m) + m) % m; };
  const double cell = 1.0 / (static_cast<double>(width) * height);
  const int bw = kernel.bandwidth();
  std::vector<Point> torus;
  torus.reserve(dots.size());
  for (const Point& p : dots) torus.push_back(ToTorus(p, width, height));

  double total = 0.0;
  for (int l2 = -bw; l2 <= bw; ++l2) {
    for (int l1 = -bw; l1 <= bw; ++l1) {
      // Pixel centers sit half a cell in from the torus origin.
      const std::size_t at =
          static_cast<std::size_t>(mod(l2, height)) * width + mod(l1, width);
      const Complex shift = std::polar(
          1.0, -std::numbers::pi * (static_cast<double>(l1) / width +
                                    static_cast<double>(l2) / height));
      const Complex w_hat = cell * shift * Complex(buf[at][0], buf[at][1]);
      Complex empirical = 0.0;
      for (const Point& t : torus) {
        empirical += std::polar(1.0, -2.0 * std::numbers::pi *
                                         (l1 * t.x + l2 * t.y));
      }
      total += kernel.coeff(l1, l2) * std::norm(lambda * empirical - w_hat);
    }
  }
  fftw_free(buf);
  return std::sqrt(total);
}

double BallDiscrepancy(std::span<const Point> dots, const GrayImage& image,
                       double radius_max, int resolution, double lambda) {
  if (!(radius_max > 0.0)) throw ValidationError("radius_max must be positive");
  if (resolution < 1) throw ValidationError("resolution must be positive");
  const double dr = radius_max / resolution;

  // (squared distance, signed mass) of every pixel and dot relative to a
  // center, swept in order of distance.
  std::vector<std::pair<double, double>> events;
  events.reserve(image.size() + dots.size());
  double total = 0.0;
  for (int cr = 0; cr < image.height(); ++cr) {
    for (int cc = 0; cc < image.width(); ++cc) {
      const Point center{cc + 1.0, cr + 1.0};
      events.clear();
      for (int r = 0; r < image.height(); ++r) {
        for (int c = 0; c < image.width(); ++c) {
          const double w = 1.0 - image.at(r, c);
          if (w == 0.0) continue;
          const double dx = c + 1.0 - center.x;
          const double dy = r + 1.0 - center.y;
          events.emplace_back(dx * dx + dy * dy, w);
        }
      }
      for (const Point& p : dots) {
        const double dx = p.x - center.x;
        const double dy = p.y - center.y;
        events.emplace_back(dx * dx + dy * dy, -lambda);
      }
      std::sort(events.begin(), events.end());
      std::size_t next = 0;
      double inside = 0.0;
      for (int k = 0; k < resolution; ++k) {
        const double radius = (k + 0.5) * dr;
        const double r2 = radius * radius;
        while (next < events.size() && events[next].first <= r2) {
          inside += events[next].second;
          ++next;
        }
        total += inside * inside * dr;
      }
    }
  }
  return std::sqrt(total);
}

std::string MetricsToJson(const MetricValues& values) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = RoundSignificant(*v, 12);
  };
  put("quadrature_error", values.quadrature_error);
  put("fourier_discrepancy", values.fourier_discrepancy);
  put("ball_discrepancy", values.ball_discrepancy);
  put("lowpass_error", values.lowpass_error);
  return j.dump();
}

}  // namespace halftone::rkhs
