#include "mvcalib/pgm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "mvcalib/errors.hpp"

namespace mvcalib::pgm {
namespace {

void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (ch != EOF && std::isspace(ch)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  long value = -1;
  if (!(in >> value) || value < 0 || value > (1L << 30)) {
    throw Error(ErrorCode::ParseError, std::string("bad PGM ") + what);
  }
  return static_cast<int>(value);
}

}  // namespace

features::GrayImage read(std::istream& in) {
  char magic[2] = {0, 0};
  if (!in.read(magic, 2) || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
    throw Error(ErrorCode::ParseError, "not a P5/P2 graymap");
  }
  const bool binary = magic[1] == '5';
  const int width = read_header_int(in, "width");
  const int height = read_header_int(in, "height");
  const int maxval = read_header_int(in, "maxval");
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::ParseError, "PGM has zero dimensions");
  }
  if (maxval != 255) {
    throw Error(ErrorCode::ParseError, "only maxval 255 is supported");
  }

  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> pixels(n);
  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep)) {
      throw Error(ErrorCode::ParseError, "missing raster separator");
    }
    if (!in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(n))) {
      throw Error(ErrorCode::ParseError, "truncated P5 raster");
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const int v = read_header_int(in, "pixel");
      if (v > 255) throw Error(ErrorCode::ParseError, "pixel value exceeds maxval");
      pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return features::GrayImage(width, height, std::move(pixels));
}

features::GrayImage read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read(in);
}

void write(std::ostream& out, const features::GrayImage& img, Encoding enc) {
  out << (enc == Encoding::Binary ? "P5" : "P2") << '\n'
      << img.width() << ' ' << img.height() << '\n'
      << 255 << '\n';
  if (enc == Encoding::Binary) {
    out.write(reinterpret_cast<const char*>(img.pixels().data()),
              static_cast<std::streamsize>(img.pixels().size()));
  } else {
    for (int r = 0; r < img.height(); ++r) {
      for (int c = 0; c < img.width(); ++c) {
        out << static_cast<int>(img.at(c, r)) << (c + 1 == img.width() ? '\n' : ' ');
      }
    }
  }
}

void write(const std::filesystem::path& path, const features::GrayImage& img, Encoding enc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write(out, img, enc);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

features::GrayImage to_gray(const features::BinaryImage& img) {
  features::GrayImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      out.at(c, r) = img.at(c, r) ? 255 : 0;
    }
  }
  return out;
}

}  // namespace mvcalib::pgm
