#pragma once

#include <filesystem>
#include <iosfwd>

#include "mvcalib/features.hpp"

namespace mvcalib::pgm {

enum class Encoding { Binary /* P5 */, Ascii /* P2 */ };

/// Reads a P5 or P2 graymap with maxval 255. Comments may appear anywhere
/// whitespace is allowed in the header. Throws ParseError on malformed input.
features::GrayImage read(std::istream& in);
features::GrayImage read(const std::filesystem::path& path);

void write(std::ostream& out, const features::GrayImage& img, Encoding enc = Encoding::Binary);
void write(const std::filesystem::path& path, const features::GrayImage& img,
           Encoding enc = Encoding::Binary);

/// Foreground as 255, background as 0.
features::GrayImage to_gray(const features::BinaryImage& img);

}  // namespace mvcalib::pgm
