#ifndef HALFTONE_RKHS_H_
#define HALFTONE_RKHS_H_

// Kernel-based quality measures for dot configurations: kernel energies,
// worst-case quadrature error, Fourier-weighted and ball discrepancies.
//
// Image integrals are midpoint sums over the pixel grid with unit cell
// area, using the coordinates of halftone/attraction.h. The Fourier
// discrepancy instead maps the image onto the unit torus.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "halftone/attraction.h"
#include "halftone/image.h"

namespace halftone::rkhs {

using attraction::Point;

class RadialKernel {
 public:
  enum class Profile { kGaussian, kNegativeDistance };

  // K(x,y) = exp(-|x-y|^2 / sigma^2).
  static RadialKernel Gaussian(double sigma);
  // K(x,y) = -|x-y|. Only conditionally positive definite.
  static RadialKernel NegativeDistance();

  double operator()(const Point& a, const Point& b) const;
  bool positive_definite() const { return profile_ == Profile::kGaussian; }
  Profile profile() const { return profile_; }
  double sigma() const { return sigma_; }

 private:
  RadialKernel(Profile profile, double sigma)
      : profile_(profile), sigma_(sigma) {}
  Profile profile_;
  double sigma_;
};

// Weighted point masses. Weights are nonnegative with a finite sum.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Point> support, std::vector<double> weights);
  // Mass w = 1 - u at every pixel point, cell area 1.
  static DiscreteMeasure FromImage(const GrayImage& image);

  std::span<const Point> support() const { return support_; }
  std::span<const double> weights() const { return weights_; }
  double TotalMass() const;

 private:
  std::vector<Point> support_;
  std::vector<double> weights_;
};

// Coefficients lambda_l > 0 for frequencies |l|_inf <= bandwidth on the
// 2-torus, symmetric under l -> -l.
class FourierKernel {
 public:
  // lambda_l = (1 + |l|^2)^(-3/2).
  static FourierKernel Default(int bandwidth);
  // coeffs is row-major over l2 = -N..N (rows), l1 = -N..N (columns).
  FourierKernel(int bandwidth, std::vector<double> coeffs);

  int bandwidth() const { return bandwidth_; }
  double coeff(int l1, int l2) const {
    return coeffs_[static_cast<std::size_t>(l2 + bandwidth_) * Side() +
                   (l1 + bandwidth_)];
  }

 private:
  std::size_t Side() const { return 2 * static_cast<std::size_t>(bandwidth_) + 1; }
  int bandwidth_;
  std::vector<double> coeffs_;
};

// E_K(p) = (lambda/2) sum_ij K(p_i,p_j) - sum_i sum_x w(x) K(p_i, x).
double KernelEnergy(std::span<const Point> dots,
                    const DiscreteMeasure& image_measure,
                    const RadialKernel& kernel, double lambda);

// |h_w|^2 = sum_x sum_y w(x) w(y) K(x,y). Requires a positive definite
// kernel; throws NumericalError if the sum is below -1e-10.
double HwNormSquared(const DiscreteMeasure& image_measure,
                     const RadialKernel& kernel);

// sqrt(2 lambda E_K + |h_w|^2), the worst-case error of the quadrature rule
// lambda * sum_i f(p_i) against the image measure over the unit ball of the
// kernel's RKHS.
double QuadratureError(std::span<const Point> dots,
                       const DiscreteMeasure& image_measure,
                       const RadialKernel& kernel, double lambda);

// Pixel/dot coordinates on the unit torus: (x, y) -> ((x-1/2)/W, (y-1/2)/H).
Point ToTorus(const Point& p, int width, int height);

// sqrt(sum_l lambda_l |lambda sum_i exp(-2 pi i l.p_i) - w_hat_l|^2) with
// w_hat from a 2D DFT of the weight field 1 - u.
double FourierDiscrepancy(std::span<const Point> dots, const GrayImage& image,
                          const FourierKernel& kernel, double lambda);

// L2 discrepancy over balls B(c, r): centers on the pixel grid, radii at
// the midpoints of `resolution` equal cells of (0, radius_max].
double BallDiscrepancy(std::span<const Point> dots, const GrayImage& image,
                       double radius_max, int resolution, double lambda);

struct MetricValues {
  std::optional<double> quadrature_error;
  std::optional<double> fourier_discrepancy;
  std::optional<double> ball_discrepancy;
  std::optional<double> lowpass_error;
};

// {"quadrature_error": ..., ...} with 12 significant digits; absent
// metrics are omitted.
std::string MetricsToJson(const MetricValues& values);

}  // namespace halftone::rkhs

#endif  // HALFTONE_RKHS_H_
