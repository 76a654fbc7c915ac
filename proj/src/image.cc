#include "halftone/image.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "halftone/error.h"

namespace halftone {
namespace {

void CheckShape(int width, int height, std::size_t count) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("image dimensions must be positive, got " +
                          std::to_string(width) + "x" +
                          std::to_string(height));
  }
  if (count != static_cast<std::size_t>(width) * height) {
    throw ValidationError("image has " + std::to_string(count) +
                          " values, expected " +
                          std::to_string(static_cast<std::size_t>(width) *
                                         height));
  }
}

void CheckRange(std::span<const double> values, double lo, double hi,
                const char* type) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v >= lo && v <= hi)) {
      throw ValidationError(std::string(type) + " value " +
                            std::to_string(v) + " at index " +
                            std::to_string(i) + " outside [" +
                            std::to_string(lo) + "," + std::to_string(hi) +
                            "]");
    }
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  CheckShape(width_, height_, values_.size());
  CheckRange(values_, 0.0, 1.0, "gray");
}

GrayImage GrayImage::Filled(int width, int height, double value) {
  return GrayImage(width, height,
                   std::vector<double>(static_cast<std::size_t>(
                                           std::max(width, 0)) *
                                           std::max(height, 0),
                                       value));
}

SignedImage::SignedImage(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  CheckShape(width_, height_, values_.size());
  CheckRange(values_, -1.0, 1.0, "signed");
}

SignedImage SignedImage::Filled(int width, int height, double value) {
  return SignedImage(width, height,
                     std::vector<double>(static_cast<std::size_t>(
                                             std::max(width, 0)) *
                                             std::max(height, 0),
                                         value));
}

BinaryImage::BinaryImage(int width, int height, std::vector<int8_t> values)
    : width_(width), height_(height), values_(std::move(values)) {
  CheckShape(width_, height_, values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] != -1 && values_[i] != 1) {
      throw ValidationError("binary value " + std::to_string(values_[i]) +
                            " at index " + std::to_string(i) +
                            " is not -1 or +1");
    }
  }
}

BinaryImage BinaryImage::Filled(int width, int height, int8_t value) {
  return BinaryImage(width, height,
                     std::vector<int8_t>(static_cast<std::size_t>(
                                             std::max(width, 0)) *
                                             std::max(height, 0),
                                         value));
}

std::size_t BinaryImage::CountBlack() const {
  return static_cast<std::size_t>(
      std::count(values_.begin(), values_.end(), int8_t{-1}));
}

SignedImage ToSigned(const GrayImage& image) {
  std::vector<double> p(image.size());
  std::transform(image.values().begin(), image.values().end(), p.begin(),
                 [](double u) { return 2.0 * u - 1.0; });
  return SignedImage(image.width(), image.height(), std::move(p));
}

GrayImage ToGray(const SignedImage& image) {
  std::vector<double> u(image.size());
  std::transform(image.values().begin(), image.values().end(), u.begin(),
                 [](double p) { return std::clamp((p + 1.0) / 2.0, 0.0, 1.0); });
  return GrayImage(image.width(), image.height(), std::move(u));
}

GrayImage ToGray(const BinaryImage& image) {
  std::vector<double> u(image.size());
  std::transform(image.values().begin(), image.values().end(), u.begin(),
                 [](int8_t q) { return q > 0 ? 1.0 : 0.0; });
  return GrayImage(image.width(), image.height(), std::move(u));
}

SignedImage ToSigned(const BinaryImage& image) {
  std::vector<double> p(image.values().begin(), image.values().end());
  return SignedImage(image.width(), image.height(), std::move(p));
}

}  // namespace halftone
