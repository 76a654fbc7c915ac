#include "halftone/attraction.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "halftone/error.h"

namespace halftone::attraction {
namespace {

constexpr double kMinDistance = 1e-12;

double Distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

Point Clamp(Point p, int width, int height) {
  return {std::clamp(p.x, 1.0, static_cast<double>(width)),
          std::clamp(p.y, 1.0, static_cast<double>(height))};
}

std::string Describe(const Point& p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

}  // namespace

DotConfiguration::DotConfiguration(int width, int height,
                                   std::vector<Point> positions)
    : width_(width), height_(height), positions_(std::move(positions)) {
  if (width_ <= 0 || height_ <= 0) {
    throw ValidationError("dot domain must have positive size");
  }
  if (positions_.empty()) {
    throw ValidationError("dot configuration needs at least one dot");
  }
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    const Point& p = positions_[k];
    if (!(p.x >= 1.0 && p.x <= width_ && p.y >= 1.0 && p.y <= height_)) {
      throw ValidationError("dot " + std::to_string(k) + " at " +
                            Describe(p) + " is outside [1," +
                            std::to_string(width_) + "]x[1," +
                            std::to_string(height_) + "]");
    }
  }
}

WeightField::WeightField(const GrayImage& image)
    : width_(image.width()), height_(image.height()), values_(image.size()) {
  std::transform(image.values().begin(), image.values().end(), values_.begin(),
                 [](double u) { return 1.0 - u; });
}

WeightField::WeightField(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width_ <= 0 || height_ <= 0 ||
      values_.size() != static_cast<std::size_t>(width_) * height_) {
    throw ValidationError("weight field shape mismatch");
  }
  for (double w : values_) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw ValidationError("weight " + std::to_string(w) + " outside [0,1]");
    }
  }
}

double WeightField::Sum() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

int DotCount(const GrayImage& image) {
  const double total = WeightField(image).Sum();
  if (total < 0.5) {
    throw DegenerateInputError("image is essentially white (sum of 1-u = " +
                               std::to_string(total) + " < 0.5)");
  }
  return std::max(1, static_cast<int>(std::floor(total + 0.5)));
}

double EquilibrationLambda(const WeightField& weights, int m) {
  if (m < 1) throw ValidationError("dot count must be positive");
  return weights.Sum() / m;
}

double Energy(std::span<const Point> dots, const WeightField& weights,
              double lambda) {
  double attraction = 0.0;
  for (const Point& p : dots) {
    for (int r = 0; r < weights.height(); ++r) {
      for (int c = 0; c < weights.width(); ++c) {
        const double w = weights.at(r, c);
        if (w != 0.0) attraction += w * Distance(p, {c + 1.0, r + 1.0});
      }
    }
  }
  double repulsion = 0.0;
  for (std::size_t k = 0; k < dots.size(); ++k) {
    for (std::size_t l = k + 1; l < dots.size(); ++l) {
      repulsion += Distance(dots[k], dots[l]);
    }
  }
  return attraction - lambda * repulsion;
}

std::vector<Vec2> EnergyGradient(std::span<const Point> dots,
                                 const WeightField& weights, double lambda) {
  std::vector<Vec2> grad(dots.size());
  for (std::size_t k = 0; k < dots.size(); ++k) {
    const Point& p = dots[k];
    Vec2 g;
    for (int r = 0; r < weights.height(); ++r) {
      for (int c = 0; c < weights.width(); ++c) {
        const double w = weights.at(r, c);
        const double dx = p.x - (c + 1.0);
        const double dy = p.y - (r + 1.0);
        const double d = std::hypot(dx, dy);
        if (w == 0.0 || d < kMinDistance) continue;
        g.x += w * dx / d;
        g.y += w * dy / d;
      }
    }
    for (std::size_t l = 0; l < dots.size(); ++l) {
      if (l == k) continue;
      const double dx = p.x - dots[l].x;
      const double dy = p.y - dots[l].y;
      const double d = std::hypot(dx, dy);
      if (d < kMinDistance) continue;
      g.x -= lambda * dx / d;
      g.y -= lambda * dy / d;
    }
    grad[k] = g;
  }
  return grad;
}

std::vector<Vec2> Forces(std::span<const Point> dots,
                         const WeightField& weights, double softening) {
  const double s2 = softening * softening;
  std::vector<Vec2> forces(dots.size());
  for (std::size_t k = 0; k < dots.size(); ++k) {
    const Point& p = dots[k];
    Vec2 attract;
    for (int r = 0; r < weights.height(); ++r) {
      for (int c = 0; c < weights.width(); ++c) {
        const double w = weights.at(r, c);
        const double dx = (c + 1.0) - p.x;
        const double dy = (r + 1.0) - p.y;
        const double d2 = dx * dx + dy * dy;
        if (w == 0.0 || std::sqrt(d2) < kMinDistance) continue;
        // w/|d| times the unit vector d/|d|.
        const double scale = w / (d2 + s2);
        attract.x += scale * dx;
        attract.y += scale * dy;
      }
    }
    Vec2 repel;
    for (std::size_t m = 0; m < dots.size(); ++m) {
      if (m == k) continue;
      const double dx = dots[m].x - p.x;
      const double dy = dots[m].y - p.y;
      const double d2 = dx * dx + dy * dy;
      if (std::sqrt(d2) < kMinDistance) continue;
      repel.x += dx / d2;
      repel.y += dy / d2;
    }
    forces[k] = {attract.x - repel.x, attract.y - repel.y};
  }
  return forces;
}

DotConfiguration RandomConfiguration(int m, int width, int height,
                                     uint64_t seed) {
  if (m < 1) throw ValidationError("dot count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(1.0, static_cast<double>(width));
  std::uniform_real_distribution<double> uy(1.0, static_cast<double>(height));
  std::vector<Point> positions(static_cast<std::size_t>(m));
  for (Point& p : positions) {
    // Sequenced explicitly so the draw order is fixed.
    const double x = width > 1 ? ux(rng) : 1.0;
    const double y = height > 1 ? uy(rng) : 1.0;
    p = {x, y};
  }
  return DotConfiguration(width, height, std::move(positions));
}

EvolveResult Evolve(const DotConfiguration& start, const WeightField& weights,
                    const EvolutionParams& params) {
  if (!(params.tau > 0.0) || !(params.tol >= 0.0) || params.max_iters < 0) {
    throw ValidationError("evolution needs tau > 0, tol >= 0, max_iters >= 0");
  }
  const int width = start.width();
  const int height = start.height();
  std::vector<Point> p(start.positions().begin(), start.positions().end());
  EvolveResult result{start, 0, 0.0, false};

  for (int it = 0; it < params.max_iters; ++it) {
    const std::vector<Vec2> f = Forces(p, weights, params.softening);
    double max_disp = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      double sx = params.tau * f[k].x;
      double sy = params.tau * f[k].y;
      if (!std::isfinite(sx) || !std::isfinite(sy)) {
        throw NumericalError("non-finite force on dot " + std::to_string(k) +
                             " at iteration " + std::to_string(it));
      }
      const double len = std::hypot(sx, sy);
      if (params.max_step > 0.0 && len > params.max_step) {
        sx *= params.max_step / len;
        sy *= params.max_step / len;
      }
      const Point next = Clamp({p[k].x + sx, p[k].y + sy}, width, height);
      max_disp = std::max(max_disp, Distance(next, p[k]));
      p[k] = next;
    }
    result.iterations = it + 1;
    result.last_displacement = max_disp;
    if (max_disp < params.tol) {
      result.converged = true;
      break;
    }
  }
  result.config = DotConfiguration(width, height, std::move(p));
  return result;
}

DescentResult SubgradientDescent(const DotConfiguration& start,
                                 const WeightField& weights, double lambda,
                                 const EvolutionParams& params) {
  constexpr double kMinStep = 1e-12;
  const int width = start.width();
  const int height = start.height();
  std::vector<Point> p(start.positions().begin(), start.positions().end());
  double energy = Energy(p, weights, lambda);
  double step = params.tau;

  DescentResult result{start, energy, energy, 0, false, false};
  std::vector<Point> trial(p.size());
  for (int it = 0; it < params.max_iters; ++it) {
    result.iterations = it + 1;
    const std::vector<Vec2> g = EnergyGradient(p, weights, lambda);
    double gnorm = 0.0;
    for (const Vec2& v : g) gnorm = std::max(gnorm, std::hypot(v.x, v.y));
    if (gnorm == 0.0) {
      result.converged = true;
      break;
    }
    double max_disp = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      trial[k] = Clamp({p[k].x - step * g[k].x, p[k].y - step * g[k].y},
                       width, height);
      max_disp = std::max(max_disp, Distance(trial[k], p[k]));
    }
    const double trial_energy = Energy(trial, weights, lambda);
    if (!std::isfinite(trial_energy)) {
      throw NumericalError("non-finite energy at iteration " +
                           std::to_string(it));
    }
    if (trial_energy <= energy) {
      p.swap(trial);
      energy = trial_energy;
      if (max_disp < params.tol) {
        result.converged = true;
        break;
      }
    } else {
      step *= 0.5;
      if (step < kMinStep) {
        result.stagnated = true;
        break;
      }
    }
  }
  result.final_energy = energy;
  result.config = DotConfiguration(width, height, std::move(p));
  return result;
}

BinaryImage SnapToGrid(const DotConfiguration& config) {
  const int width = config.width();
  const int height = config.height();
  const std::size_t capacity = static_cast<std::size_t>(width) * height;
  if (config.size() > capacity) {
    throw CapacityError(std::to_string(config.size()) +
                        " dots do not fit on " + std::to_string(capacity) +
                        " pixels");
  }
  std::vector<int8_t> q(capacity, 1);
  auto free_at = [&](int r, int c) {
    return q[static_cast<std::size_t>(r) * width + c] == 1;
  };

  for (const Point& p : config.positions()) {
    const int c0 = std::clamp(static_cast<int>(std::floor(p.x + 0.5)), 1, width) - 1;
    const int r0 = std::clamp(static_cast<int>(std::floor(p.y + 0.5)), 1, height) - 1;
    int best_r = r0;
    int best_c = c0;
    if (!free_at(r0, c0)) {
      double best_d2 = std::numeric_limits<double>::infinity();
      best_r = best_c = -1;
      const int max_ring = std::max(width, height);
      for (int ring = 1; ring <= max_ring; ++ring) {
        // Every pixel on this ring is at least ring - 0.5 away from p.
        const double lower = ring - 0.5;
        if (best_r >= 0 && lower * lower > best_d2) break;
        for (int r = r0 - ring; r <= r0 + ring; ++r) {
          if (r < 0 || r >= height) continue;
          const bool edge_row = (r == r0 - ring || r == r0 + ring);
          for (int c = c0 - ring; c <= c0 + ring; ++c) {
            if (c < 0 || c >= width) continue;
            if (!edge_row && c != c0 - ring && c != c0 + ring) continue;
            if (!free_at(r, c)) continue;
            const double dx = (c + 1.0) - p.x;
            const double dy = (r + 1.0) - p.y;
            const double d2 = dx * dx + dy * dy;
            const bool earlier = r < best_r || (r == best_r && c < best_c);
            if (d2 < best_d2 || (d2 == best_d2 && earlier)) {
              best_d2 = d2;
              best_r = r;
              best_c = c;
            }
          }
        }
      }
    }
    q[static_cast<std::size_t>(best_r) * width + best_c] = -1;
  }
  return BinaryImage(width, height, std::move(q));
}

void WriteDotsCsv(std::ostream& out, const DotConfiguration& config) {
  out << "x,y\n";
  char line[64];
  for (const Point& p : config.positions()) {
    std::snprintf(line, sizeof line, "%.9g,%.9g\n", p.x, p.y);
    out << line;
  }
}

std::string FormatDotsCsv(const DotConfiguration& config) {
  std::ostringstream out;
  WriteDotsCsv(out, config);
  return out.str();
}

DotConfiguration ReadDotsCsv(std::istream& in, int width, int height) {
  std::string line;
  if (!std::getline(in, line) || line != "x,y") {
    throw ValidationError("dots CSV must start with header \"x,y\"");
  }
  std::vector<Point> positions;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError("dots CSV line " + std::to_string(lineno) +
                            " has no comma");
    }
    try {
      positions.push_back(
          {std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::exception&) {
      throw ValidationError("dots CSV line " + std::to_string(lineno) +
                            " is not numeric");
    }
  }
  return DotConfiguration(width, height, std::move(positions));
}

}  // namespace halftone::attraction
