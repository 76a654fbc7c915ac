#ifndef HALFTONE_ATTRACTION_H_
#define HALFTONE_ATTRACTION_H_

// Analog halftoning: black dots at continuous positions are attracted by
// dark pixels and repel each other.
//
// Coordinates follow the pixel grid with 1-based indices: pixel (row r,
// col c), zero-based, sits at the point (x, y) = (c + 1, r + 1). The dot
// domain for a width x height image is [1, width] x [1, height].

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "halftone/image.h"

namespace halftone::attraction {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

using Vec2 = Point;

class DotConfiguration {
 public:
  // Throws ValidationError if a position lies outside [1,width]x[1,height]
  // or the list is empty.
  DotConfiguration(int width, int height, std::vector<Point> positions);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return positions_.size(); }
  std::span<const Point> positions() const { return positions_; }

  friend bool operator==(const DotConfiguration&,
                         const DotConfiguration&) = default;

 private:
  int width_;
  int height_;
  std::vector<Point> positions_;
};

// w = 1 - u on the integer grid.
class WeightField {
 public:
  explicit WeightField(const GrayImage& image);
  WeightField(int width, int height, std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  double at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const double> values() const { return values_; }
  double Sum() const;

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

struct EvolutionParams {
  double tau = 0.1;
  int max_iters = 20000;
  // Stop once no particle moves farther than this in one step.
  double tol = 1e-6;
  uint64_t seed = 0;
  // Attraction softening length in pixels: a grid charge acts with
  // w*(x-p)/(|x-p|^2 + softening^2). Zero gives the bare 1/r law.
  double softening = 1.0;
  // Upper bound on the length of a single particle step; <= 0 disables.
  double max_step = 1.0;
};

// Number of dots m = round(sum of (1 - u)), at least 1.
// Throws DegenerateInputError when the weight sum is below 0.5.
int DotCount(const GrayImage& image);

// lambda = (1/m) * sum of w.
double EquilibrationLambda(const WeightField& weights, int m);

// sum_k sum_x w(x) |p_k - x| - lambda * sum_{k<l} |p_k - p_l|.
double Energy(std::span<const Point> dots, const WeightField& weights,
              double lambda);

// Gradient of Energy with respect to every dot position. Terms at distance
// below 1e-12 contribute zero (a valid subgradient choice).
std::vector<Vec2> EnergyGradient(std::span<const Point> dots,
                                 const WeightField& weights, double lambda);

// Per-dot resultant F_k = F_k^(A) - F_k^(R): attraction of magnitude
// w(x)/|x - p_k| toward every grid point, repulsion 1/|p_m - p_k| away from
// every other dot. Terms at distance below 1e-12 are skipped. With
// softening > 0 the attraction becomes w(x)(x - p_k)/(|x - p_k|^2 + s^2).
std::vector<Vec2> Forces(std::span<const Point> dots,
                         const WeightField& weights, double softening = 0.0);

// m positions drawn uniformly from the domain with a seeded mt19937_64.
DotConfiguration RandomConfiguration(int m, int width, int height,
                                     uint64_t seed);

struct EvolveResult {
  DotConfiguration config;
  int iterations = 0;
  double last_displacement = 0.0;
  bool converged = false;
};

// Explicit force iteration p_k <- clamp(p_k + tau * F_k).
EvolveResult Evolve(const DotConfiguration& start, const WeightField& weights,
                    const EvolutionParams& params);

struct DescentResult {
  DotConfiguration config;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  int iterations = 0;
  bool converged = false;
  // Step size fell below 1e-12 before convergence; config is the best
  // iterate seen.
  bool stagnated = false;
};

// Subgradient descent on Energy with step halving whenever a trial step
// would increase the energy. The initial step is params.tau.
DescentResult SubgradientDescent(const DotConfiguration& start,
                                 const WeightField& weights, double lambda,
                                 const EvolutionParams& params);

// Rounds every dot to the nearest pixel. A dot whose pixel is already taken
// moves to the nearest free pixel (Euclidean distance from the dot, ties to
// the first in row-major order). Black pixels are -1.
BinaryImage SnapToGrid(const DotConfiguration& config);

// CSV with header "x,y" and 9 significant digits per coordinate.
void WriteDotsCsv(std::ostream& out, const DotConfiguration& config);
std::string FormatDotsCsv(const DotConfiguration& config);
DotConfiguration ReadDotsCsv(std::istream& in, int width, int height);

}  // namespace halftone::attraction

#endif  // HALFTONE_ATTRACTION_H_
