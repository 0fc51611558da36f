#pragma once

#include <cstdint>
#include <vector>

#include "mvcalib/geometry.hpp"

namespace mvcalib::features {

/// Row-major 8-bit grayscale image. u is the column, v the row; origin at
/// the top-left pixel.
class GrayImage {
 public:
  GrayImage() = default;
  /// Throws InvalidArgument on non-positive dimensions.
  GrayImage(int width, int height, std::uint8_t fill = 0);
  /// Throws ShapeMismatch unless pixels.size() == width * height.
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint8_t at(int col, int row) const { return pixels_[index(col, row)]; }
  std::uint8_t& at(int col, int row) { return pixels_[index(col, row)]; }
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Row-major mask; true is foreground (white).
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }
  bool at(int col, int row) const { return bits_[index(col, row)] != 0; }
  void set(int col, int row, bool value) { bits_[index(col, row)] = value ? 1 : 0; }
  /// Pixels outside the image read as false.
  bool get_or_false(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_ && row < height_ && at(col, row);
  }
  std::size_t count() const;
  bool same_shape(const BinaryImage& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct Blob {
  int label = 0;
  std::size_t pixel_count = 0;
  Point2 centroid;  // mean of member pixel coordinates
};

struct DetectionParams {
  int threshold = 128;
  int radius = 7;
  std::size_t min_pixels = 4;
};

/// intensity >= threshold. Throws InvalidArgument for thresholds outside 0..255.
BinaryImage binarize(const GrayImage& img, int threshold);

BinaryImage invert(const BinaryImage& img);

/// Square-element (side 2r+1) erosion and dilation; pixels outside the
/// image count as false.
BinaryImage erode(const BinaryImage& img, int radius);
BinaryImage dilate(const BinaryImage& img, int radius);

/// Morphological opening: foreground structures too small to contain the
/// (2r+1)x(2r+1) element disappear, large regions survive.
/// Throws InvalidArgument for radius < 1.
BinaryImage estimate_background(const BinaryImage& img, int radius);

/// img AND NOT background. Throws ShapeMismatch on differing dimensions.
BinaryImage subtract(const BinaryImage& img, const BinaryImage& background);

/// 8-connected components of the foreground with at least `min_pixels`
/// members, sorted by (centroid.v, centroid.u). Labels are 1-based in
/// output order. Throws InvalidArgument if min_pixels is 0.
std::vector<Blob> connected_components(const BinaryImage& img, std::size_t min_pixels);

/// Dark-dot detector: binarize, invert, estimate the background by opening,
/// subtract it and label what is left.
std::vector<Blob> detect_dots(const GrayImage& img, const DetectionParams& params = {});

}  // namespace mvcalib::features
