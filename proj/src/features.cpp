#include "mvcalib/features.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "mvcalib/errors.hpp"

namespace mvcalib::features {
namespace {

void require_dimensions(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
  }
}

// Separable square-element pass: along one axis, a pixel is set to the AND
// (erosion) or OR (dilation) of its 2r+1 neighbours.
BinaryImage sweep(const BinaryImage& img, int radius, bool horizontal, bool erode_pass) {
  BinaryImage out(img.width(), img.height());
  const int w = img.width();
  const int h = img.height();
  const int len = horizontal ? w : h;
  const int lines = horizontal ? h : w;
  std::vector<int> prefix(static_cast<std::size_t>(len) + 1);
  for (int line = 0; line < lines; ++line) {
    prefix[0] = 0;
    for (int i = 0; i < len; ++i) {
      const bool bit = horizontal ? img.at(i, line) : img.at(line, i);
      prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + (bit ? 1 : 0);
    }
    for (int i = 0; i < len; ++i) {
      const int lo = i - radius;
      const int hi = i + radius;
      const int clo = std::max(lo, 0);
      const int chi = std::min(hi, len - 1);
      const int ones = prefix[static_cast<std::size_t>(chi) + 1] - prefix[static_cast<std::size_t>(clo)];
      // Out-of-image samples are false.
      const bool value = erode_pass ? (lo >= 0 && hi < len && ones == 2 * radius + 1) : ones > 0;
      if (horizontal) out.set(i, line, value);
      else out.set(line, i, value);
    }
  }
  return out;
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  require_dimensions(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  require_dimensions(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::ShapeMismatch, "pixel count does not match dimensions");
  }
}

BinaryImage::BinaryImage(int width, int height, bool fill) : width_(width), height_(height) {
  require_dimensions(width, height);
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t BinaryImage::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryImage binarize(const GrayImage& img, int threshold) {
  if (threshold < 0 || threshold > 255) {
    throw Error(ErrorCode::InvalidArgument, "threshold must be within 0..255");
  }
  BinaryImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      out.set(c, r, img.at(c, r) >= threshold);
    }
  }
  return out;
}

BinaryImage invert(const BinaryImage& img) {
  BinaryImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      out.set(c, r, !img.at(c, r));
    }
  }
  return out;
}

BinaryImage erode(const BinaryImage& img, int radius) {
  return sweep(sweep(img, radius, true, true), radius, false, true);
}

BinaryImage dilate(const BinaryImage& img, int radius) {
  return sweep(sweep(img, radius, true, false), radius, false, false);
}

BinaryImage estimate_background(const BinaryImage& img, int radius) {
  if (radius < 1) {
    throw Error(ErrorCode::InvalidArgument, "structuring element radius must be >= 1");
  }
  return dilate(erode(img, radius), radius);
}

BinaryImage subtract(const BinaryImage& img, const BinaryImage& background) {
  if (!img.same_shape(background)) {
    throw Error(ErrorCode::ShapeMismatch, "images differ in size");
  }
  BinaryImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      out.set(c, r, img.at(c, r) && !background.at(c, r));
    }
  }
  return out;
}

std::vector<Blob> connected_components(const BinaryImage& img, std::size_t min_pixels) {
  if (min_pixels == 0) {
    throw Error(ErrorCode::InvalidArgument, "min_pixels must be >= 1");
  }
  const int w = img.width();
  const int h = img.height();
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  auto idx = [w](int c, int r) {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c);
  };

  std::vector<Blob> blobs;
  std::vector<std::array<int, 2>> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!img.at(c, r) || visited[idx(c, r)]) continue;
      visited[idx(c, r)] = 1;
      stack.push_back({c, r});
      std::size_t n = 0;
      double sum_u = 0.0;
      double sum_v = 0.0;
      while (!stack.empty()) {
        const auto [pc, pr] = stack.back();
        stack.pop_back();
        ++n;
        sum_u += pc;
        sum_v += pr;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nc = pc + dc;
            const int nr = pr + dr;
            if (img.get_or_false(nc, nr) && !visited[idx(nc, nr)]) {
              visited[idx(nc, nr)] = 1;
              stack.push_back({nc, nr});
            }
          }
        }
      }
      if (n >= min_pixels) {
        const auto count = static_cast<double>(n);
        blobs.push_back({0, n, {sum_u / count, sum_v / count}});
      }
    }
  }

  std::sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) {
    if (a.centroid.v != b.centroid.v) return a.centroid.v < b.centroid.v;
    return a.centroid.u < b.centroid.u;
  });
  for (std::size_t i = 0; i < blobs.size(); ++i) blobs[i].label = static_cast<int>(i) + 1;
  return blobs;
}

std::vector<Blob> detect_dots(const GrayImage& img, const DetectionParams& params) {
  const BinaryImage binary = binarize(img, params.threshold);
  const BinaryImage inverted = invert(binary);
  const BinaryImage background = estimate_background(inverted, params.radius);
  const BinaryImage foreground = subtract(inverted, background);
  return connected_components(foreground, params.min_pixels);
}

}  // namespace mvcalib::features
