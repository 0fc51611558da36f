#include "mvcalib/scene_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mvcalib/errors.hpp"

namespace mvcalib::io {
namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> fields;
};

std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream ss(text);
    Line line{number, {}};
    for (std::string f; ss >> f;) line.fields.push_back(f);
    if (!line.fields.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_real(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    fail(line, "not a finite number: '" + s + "'");
  }
  return v;
}

void expect_fields(const Line& line, std::size_t n) {
  if (line.fields.size() != n) {
    fail(line.number, "expected " + std::to_string(n) + " fields, got " +
                          std::to_string(line.fields.size()));
  }
}

Point3 point3_at(const Line& line, std::size_t first) {
  return {parse_real(line.fields[first], line.number),
          parse_real(line.fields[first + 1], line.number),
          parse_real(line.fields[first + 2], line.number)};
}

void check_unique(std::unordered_set<std::string>& seen, const Line& line) {
  if (!seen.insert(line.fields[0]).second) {
    fail(line.number, "duplicate id '" + line.fields[0] + "'");
  }
}

template <typename Fn>
auto with_input(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return fn(in);
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<WorldPoint> read_world_points(std::istream& in) {
  std::vector<WorldPoint> out;
  std::unordered_set<std::string> seen;
  for (const auto& line : tokenize(in)) {
    expect_fields(line, 4);
    check_unique(seen, line);
    out.push_back({line.fields[0], point3_at(line, 1)});
  }
  return out;
}

std::vector<ImagePoint> read_image_points(std::istream& in) {
  std::vector<ImagePoint> out;
  std::unordered_set<std::string> seen;
  for (const auto& line : tokenize(in)) {
    expect_fields(line, 3);
    check_unique(seen, line);
    out.push_back({line.fields[0],
                   {parse_real(line.fields[1], line.number), parse_real(line.fields[2], line.number)}});
  }
  return out;
}

std::vector<PairRecord> read_frame_pairs(std::istream& in) {
  std::vector<PairRecord> out;
  std::unordered_set<std::string> seen;
  for (const auto& line : tokenize(in)) {
    expect_fields(line, 7);
    check_unique(seen, line);
    out.push_back({line.fields[0], point3_at(line, 1), point3_at(line, 4)});
  }
  return out;
}

CameraRecord read_camera(std::istream& in) {
  const std::vector<Line> lines = tokenize(in);
  std::size_t i = 0;
  auto next = [&](const char* what) -> const Line& {
    if (i >= lines.size()) {
      throw Error(ErrorCode::ParseError, std::string("camera file ends before ") + what);
    }
    return lines[i++];
  };
  auto keyword = [&](const Line& line, const char* key, std::size_t n) {
    if (line.fields[0] != key) fail(line.number, std::string("expected '") + key + "'");
    expect_fields(line, n);
  };

  const Line& header = next("header");
  std::string joined;
  for (const auto& f : header.fields) joined += (joined.empty() ? "" : " ") + f;
  if (joined != kCameraHeader) fail(header.number, "missing 'mvcalib-camera v1' header");

  keyword(next("M"), "M", 1);
  Eigen::Matrix<double, 3, 4> m;
  for (int r = 0; r < 3; ++r) {
    const Line& row = next("M row");
    expect_fields(row, 4);
    for (int c = 0; c < 4; ++c) m(r, c) = parse_real(row.fields[static_cast<std::size_t>(c)], row.number);
  }

  const Line& k = next("K");
  keyword(k, "K", 5);
  const CameraIntrinsics intr(parse_real(k.fields[1], k.number), parse_real(k.fields[2], k.number),
                              parse_real(k.fields[3], k.number), parse_real(k.fields[4], k.number));

  keyword(next("R"), "R", 1);
  Eigen::Matrix3d r;
  for (int row_i = 0; row_i < 3; ++row_i) {
    const Line& row = next("R row");
    expect_fields(row, 3);
    for (int c = 0; c < 3; ++c) r(row_i, c) = parse_real(row.fields[static_cast<std::size_t>(c)], row.number);
  }

  const Line& t = next("T");
  keyword(t, "T", 4);
  const Eigen::Vector3d trans(parse_real(t.fields[1], t.number), parse_real(t.fields[2], t.number),
                              parse_real(t.fields[3], t.number));
  if (i != lines.size()) fail(lines[i].number, "unexpected trailing content");

  return {ProjectionMatrix(m), Camera{intr, RigidTransform{Rotation3(r), trans}}};
}

void write_world_points(std::ostream& out, std::span<const WorldPoint> pts) {
  out << "# id x y z\n";
  for (const auto& p : pts) {
    out << p.id << ' ' << format_real(p.point.x) << ' ' << format_real(p.point.y) << ' '
        << format_real(p.point.z) << '\n';
  }
}

void write_image_points(std::ostream& out, std::span<const ImagePoint> pts) {
  out << "# id u v\n";
  for (const auto& p : pts) {
    out << p.id << ' ' << format_real(p.point.u) << ' ' << format_real(p.point.v) << '\n';
  }
}

void write_frame_pairs(std::ostream& out, std::span<const PairRecord> pairs) {
  out << "# id lx ly lz gx gy gz\n";
  for (const auto& p : pairs) {
    out << p.id << ' ' << format_real(p.local.x) << ' ' << format_real(p.local.y) << ' '
        << format_real(p.local.z) << ' ' << format_real(p.global.x) << ' '
        << format_real(p.global.y) << ' ' << format_real(p.global.z) << '\n';
  }
}

void write_camera(std::ostream& out, const CameraRecord& cam) {
  out << kCameraHeader << '\n' << "M\n";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) out << format_real(cam.matrix(r, c)) << (c == 3 ? '\n' : ' ');
  }
  const auto& k = cam.camera.intrinsics;
  out << "K " << format_real(k.alpha_u) << ' ' << format_real(k.alpha_v) << ' '
      << format_real(k.u0) << ' ' << format_real(k.v0) << '\n';
  out << "R\n";
  const auto& rot = cam.camera.extrinsics.rotation;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << format_real(rot(r, c)) << (c == 2 ? '\n' : ' ');
  }
  const auto& t = cam.camera.extrinsics.translation;
  out << "T " << format_real(t.x()) << ' ' << format_real(t.y()) << ' ' << format_real(t.z())
      << '\n';
}

void write_blobs_csv(std::ostream& out, std::span<const features::Blob> blobs) {
  out << "label,count,u,v\n";
  for (const auto& b : blobs) {
    out << b.label << ',' << b.pixel_count << ',' << format_real(b.centroid.u) << ','
        << format_real(b.centroid.v) << '\n';
  }
}

std::vector<dlt::Correspondence> join(std::span<const WorldPoint> world,
                                      std::span<const ImagePoint> image) {
  std::unordered_map<std::string, Point2> by_id;
  for (const auto& p : image) by_id.emplace(p.id, p.point);
  std::unordered_set<std::string> world_ids;
  std::vector<dlt::Correspondence> out;
  for (const auto& w : world) {
    world_ids.insert(w.id);
    if (auto it = by_id.find(w.id); it != by_id.end()) out.push_back({w.point, it->second});
  }
  for (const auto& p : image) {
    if (!world_ids.contains(p.id)) {
      throw Error(ErrorCode::ParseError, "image point '" + p.id + "' has no world point");
    }
  }
  return out;
}

registration::FramePair to_frame_pair(std::span<const PairRecord> pairs) {
  std::vector<Point3> local;
  std::vector<Point3> global;
  for (const auto& p : pairs) {
    local.push_back(p.local);
    global.push_back(p.global);
  }
  return registration::FramePair(std::move(local), std::move(global));
}

std::vector<WorldPoint> read_world_points(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return read_world_points(in); });
}

std::vector<ImagePoint> read_image_points(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return read_image_points(in); });
}

std::vector<PairRecord> read_frame_pairs(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return read_frame_pairs(in); });
}

CameraRecord read_camera(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return read_camera(in); });
}

void write_camera(const std::filesystem::path& path, const CameraRecord& cam) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_camera(out, cam);
}

}  // namespace mvcalib::io
