#ifndef HALFTONE_IMAGE_H_
#define HALFTONE_IMAGE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace halftone {

// Row-major pixel address, top-left origin.
struct GridIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

// Gray levels in [0,1]; 0 is black, 1 is white.
class GrayImage {
 public:
  GrayImage(int width, int height, std::vector<double> values);
  static GrayImage Filled(int width, int height, double value);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  double at(int row, int col) const { return values_[Index(row, col)]; }
  double at(GridIndex ix) const { return at(ix.row, ix.col); }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t Index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }
  int width_;
  int height_;
  std::vector<double> values_;
};

// Centered pixel values p = 2u - 1 in [-1,1].
class SignedImage {
 public:
  SignedImage(int width, int height, std::vector<double> values);
  static SignedImage Filled(int width, int height, double value);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  double at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const double> values() const { return values_; }

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

// Halftone output: every value is -1 (black) or +1 (white).
class BinaryImage {
 public:
  BinaryImage(int width, int height, std::vector<int8_t> values);
  static BinaryImage Filled(int width, int height, int8_t value);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  int8_t at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  int8_t at(GridIndex ix) const { return at(ix.row, ix.col); }
  std::span<const int8_t> values() const { return values_; }
  std::size_t CountBlack() const;

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<int8_t> values_;
};

SignedImage ToSigned(const GrayImage& image);
GrayImage ToGray(const SignedImage& image);
GrayImage ToGray(const BinaryImage& image);
SignedImage ToSigned(const BinaryImage& image);

}  // namespace halftone

#endif  // HALFTONE_IMAGE_H_
