#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mvcalib/dlt.hpp"
#include "mvcalib/features.hpp"
#include "mvcalib/projection.hpp"
#include "mvcalib/registration.hpp"

// Line-oriented text formats. Fields are whitespace separated, '#' starts a
// comment, blank lines are ignored. Reals are written with 17 significant
// digits so doubles survive a write/read cycle unchanged.
namespace mvcalib::io {

inline constexpr std::string_view kCameraHeader = "mvcalib-camera v1";

struct WorldPoint {
  std::string id;
  Point3 point;
};

struct ImagePoint {
  std::string id;
  Point2 point;
};

struct PairRecord {
  std::string id;
  Point3 local;
  Point3 global;
};

/// Camera file contents: the normalized matrix next to its decomposition.
struct CameraRecord {
  ProjectionMatrix matrix;
  Camera camera;

  friend bool operator==(const CameraRecord&, const CameraRecord&) = default;
};

std::string format_real(double value);

/// `id x y z` lines. Throws ParseError (with the line number) on bad rows
/// or duplicate ids.
std::vector<WorldPoint> read_world_points(std::istream& in);
/// `id u v` lines.
std::vector<ImagePoint> read_image_points(std::istream& in);
/// `id lx ly lz gx gy gz` lines.
std::vector<PairRecord> read_frame_pairs(std::istream& in);
CameraRecord read_camera(std::istream& in);

void write_world_points(std::ostream& out, std::span<const WorldPoint> pts);
void write_image_points(std::ostream& out, std::span<const ImagePoint> pts);
void write_frame_pairs(std::ostream& out, std::span<const PairRecord> pairs);
void write_camera(std::ostream& out, const CameraRecord& cam);
/// `label,count,u,v` with a header row.
void write_blobs_csv(std::ostream& out, std::span<const features::Blob> blobs);

/// Correspondences in world-file order for every world id that also has an
/// image point. Throws ParseError if an image id has no world point.
std::vector<dlt::Correspondence> join(std::span<const WorldPoint> world,
                                      std::span<const ImagePoint> image);

registration::FramePair to_frame_pair(std::span<const PairRecord> pairs);

// Path overloads; IoError if the file cannot be opened.
std::vector<WorldPoint> read_world_points(const std::filesystem::path& path);
std::vector<ImagePoint> read_image_points(const std::filesystem::path& path);
std::vector<PairRecord> read_frame_pairs(const std::filesystem::path& path);
CameraRecord read_camera(const std::filesystem::path& path);
void write_camera(const std::filesystem::path& path, const CameraRecord& cam);

}  // namespace mvcalib::io
