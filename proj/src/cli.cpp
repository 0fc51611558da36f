#include "mvcalib/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mvcalib/dlt.hpp"
#include "mvcalib/errors.hpp"
#include "mvcalib/features.hpp"
#include "mvcalib/pgm.hpp"
#include "mvcalib/registration.hpp"
#include "mvcalib/scene_io.hpp"
#include "mvcalib/simulator.hpp"

namespace mvcalib::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kUsageError = 2;

struct SimulateOptions {
  std::string out_dir;
  std::size_t cameras = 4;
  std::size_t dots = 19;
  std::optional<std::size_t> calibration_points;
  std::optional<std::size_t> registration_points;
  double noise = 0.0;
  std::uint64_t seed = 1;
  int dot_radius = 5;
  int width = 1000;
  int height = 1100;
  bool distinct_poses = false;
};

struct CalibrateOptions {
  std::string world;
  std::string image;
  std::string out;
  bool report = false;
};

struct RegisterOptions {
  std::string pairs;
  std::string camera;
  std::string out;
};

struct UnifyOptions {
  std::vector<std::string> cameras;
  std::string point;
  bool round = false;
  bool pixel = false;
  std::optional<int> width;
  std::optional<int> height;
};

struct DetectOptions {
  std::string image;
  std::string out;
  int threshold = 128;
  int radius = 7;
  std::size_t min_pixels = 4;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

std::string camera_name(std::size_t i) { return "cam" + std::to_string(i); }

int run_simulate(const SimulateOptions& o, std::ostream& out) {
  sim::PatternSpec pspec;
  pspec.dot_count = o.dots;
  pspec.calibration_count = o.calibration_points.value_or(std::min<std::size_t>(8, o.dots));
  pspec.registration_count = o.registration_points.value_or(std::min<std::size_t>(18, o.dots));
  const sim::Pattern pattern = sim::generate_pattern(pspec, sim::derive_seed(o.seed, 0));

  sim::RigSpec rspec;
  rspec.camera_count = o.cameras;
  rspec.width = o.width;
  rspec.height = o.height;
  rspec.intrinsics = CameraIntrinsics(1000.0, 1000.0, o.width / 2.0, o.height / 2.0);
  rspec.shared_pose = !o.distinct_poses;
  rspec.margin_px = std::max(20.0, static_cast<double>(o.dot_radius) + 2.0);
  rspec.min_separation_px = std::max(20.0, 2.0 * o.dot_radius + 4.0);
  const auto rig = sim::generate_rig(rspec, pattern, sim::derive_seed(o.seed, 1));

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);

  {
    std::vector<io::WorldPoint> global;
    for (std::size_t i = 0; i < pattern.dots.size(); ++i) {
      global.push_back({"p" + std::to_string(i), pattern.dots[i]});
    }
    auto f = open_output(dir / "pattern.txt");
    io::write_world_points(f, global);
  }

  for (std::size_t c = 0; c < rig.size(); ++c) {
    const std::string name = camera_name(c);
    const sim::Observation obs =
        sim::observe(rig[c], pattern, {o.noise, sim::derive_seed(o.seed, 100 + c)});

    std::vector<io::WorldPoint> world;
    std::vector<io::ImagePoint> image;
    for (auto i : pattern.calibration) {
      const std::string id = "p" + std::to_string(i);
      world.push_back({id, obs.correspondences[i].world});
      image.push_back({id, obs.correspondences[i].pixel});
    }
    std::vector<io::PairRecord> pairs;
    for (std::size_t k = 0; k < pattern.registration.size(); ++k) {
      pairs.push_back({"p" + std::to_string(pattern.registration[k]),
                       obs.frame_pair.local()[k], obs.frame_pair.global()[k]});
    }
    {
      auto f = open_output(dir / (name + "_world.txt"));
      io::write_world_points(f, world);
    }
    {
      auto f = open_output(dir / (name + "_image.txt"));
      io::write_image_points(f, image);
    }
    {
      auto f = open_output(dir / (name + "_pairs.txt"));
      io::write_frame_pairs(f, pairs);
    }
    const Camera local = rig[c].local_camera();
    io::write_camera(dir / (name + "_truth_local.cam"), {to_matrix(local), local});
    io::write_camera(dir / (name + "_truth_global.cam"), {to_matrix(rig[c].camera), rig[c].camera});
    pgm::write(dir / (name + ".pgm"),
               sim::render_dot_image(rig[c].camera, pattern.dots, o.width, o.height, o.dot_radius));
  }

  const Point3 probe = pattern.dots.back();
  auto f = open_output(dir / "scene.txt");
  f << "# simulated calibration scene\n"
    << "rng " << sim::kRngAlgorithm << '\n'
    << "gaussian " << sim::kGaussianAlgorithm << '\n'
    << "seed " << o.seed << '\n'
    << "noise " << io::format_real(o.noise) << '\n'
    << "cameras " << o.cameras << '\n'
    << "dots " << o.dots << '\n'
    << "calibration_points " << pattern.calibration.size() << '\n'
    << "registration_points " << pattern.registration.size() << '\n'
    << "width " << o.width << '\n'
    << "height " << o.height << '\n'
    << "dot_radius " << o.dot_radius << '\n'
    << "shared_pose " << (o.distinct_poses ? 0 : 1) << '\n'
    << "probe " << io::format_real(probe.x) << ' ' << io::format_real(probe.y) << ' '
    << io::format_real(probe.z) << '\n';

  out << "wrote " << rig.size() << " cameras to " << dir.string() << '\n';
  return 0;
}

int run_calibrate(const CalibrateOptions& o, std::ostream& out) {
  const auto world = io::read_world_points(fs::path(o.world));
  const auto image = io::read_image_points(fs::path(o.image));
  const auto corrs = io::join(world, image);
  const dlt::CalibrationResult result = dlt::calibrate(corrs);
  io::write_camera(fs::path(o.out), {result.matrix, result.camera});

  if (o.report) {
    const auto& e = result.errors;
    out << "# reprojection error, observed - projected (pixels)\n"
        << "camera mean_error_x mean_error_y rms points\n"
        << fs::path(o.out).stem().string() << ' ' << io::format_real(e.mean_x) << ' '
        << io::format_real(e.mean_y) << ' ' << io::format_real(e.rms) << ' ' << e.count << '\n';
  }
  return 0;
}

int run_register(const RegisterOptions& o, std::ostream& out) {
  const auto pairs = io::read_frame_pairs(fs::path(o.pairs));
  const registration::FramePair fp = io::to_frame_pair(pairs);
  const io::CameraRecord cam = io::read_camera(fs::path(o.camera));

  const RigidTransform frame = registration::estimate_registration(fp);
  const registration::RegisteredCamera reg = registration::register_camera(cam.camera, frame);
  io::write_camera(fs::path(o.out), {to_matrix(reg.camera), reg.camera});

  double residual = 0.0;
  for (std::size_t i = 0; i < fp.size(); ++i) {
    residual = std::max(residual,
                        (apply_rigid(frame, fp.local()[i]).vec() - fp.global()[i].vec()).norm());
  }
  out << "frame_R";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << ' ' << io::format_real(frame.rotation(r, c));
  }
  out << "\nframe_T " << io::format_real(frame.translation.x()) << ' '
      << io::format_real(frame.translation.y()) << ' ' << io::format_real(frame.translation.z())
      << "\nmax_residual " << io::format_real(residual) << '\n';
  return 0;
}

Point3 parse_point(const std::string& text) {
  std::istringstream ss(text);
  Point3 p;
  std::string extra;
  if (!(ss >> p.x >> p.y >> p.z) || (ss >> extra) || !is_finite(p)) {
    throw Error(ErrorCode::ParseError, "--point must hold three numbers, got '" + text + "'");
  }
  return p;
}

int run_unify(const UnifyOptions& o, std::ostream& out, std::ostream& err) {
  std::optional<SensorModel> fb;
  if (o.pixel) {
    if (!o.width || !o.height || *o.width <= 0 || *o.height <= 0) {
      err << "error: --pixel needs positive --width and --height\n";
      return kUsageError;
    }
    fb = SensorModel::centered(*o.width, *o.height);
  }
  const Point3 p = parse_point(o.point);
  std::vector<registration::RegisteredCamera> cams;
  for (const auto& path : o.cameras) {
    const io::CameraRecord rec = io::read_camera(fs::path(path));
    cams.push_back({rec.camera, RigidTransform::identity()});
  }

  const auto u = registration::unify_point(cams, p, o.round, registration::kUnifyTolerance, fb);
  for (std::size_t i = 0; i < u.entries.size(); ++i) {
    out << "camera " << i << ' ' << o.cameras[i];
    if (const auto& c = u.entries[i].coordinate) {
      out << ' ' << io::format_real(c->u) << ' ' << io::format_real(c->v) << '\n';
    } else {
      out << " error " << to_string(*u.entries[i].error) << '\n';
    }
  }
  if (u.consensus) {
    out << "consensus " << io::format_real(u.consensus->u) << ' '
        << io::format_real(u.consensus->v) << '\n';
  } else {
    out << "consensus none\n";
  }
  out << "max_deviation " << io::format_real(u.max_deviation) << '\n';
  registration::require_consensus(u);
  return 0;
}

int run_detect(const DetectOptions& o, std::ostream& out) {
  const features::GrayImage img = pgm::read(fs::path(o.image));
  const auto blobs = features::detect_dots(img, {o.threshold, o.radius, o.min_pixels});
  auto f = open_output(fs::path(o.out));
  io::write_blobs_csv(f, blobs);
  out << "blobs " << blobs.size() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-camera DLT calibration and registration toolkit", "mvcalib"};
  app.require_subcommand(1);

  SimulateOptions sim_o;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic scene bundle");
  sim_cmd->add_option("--out", sim_o.out_dir, "Output directory")->required();
  sim_cmd->add_option("--cameras", sim_o.cameras, "Number of rig entries")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--dots", sim_o.dots, "Calibration pattern dots");
  sim_cmd->add_option("--calibration-points", sim_o.calibration_points, "Dots used for DLT");
  sim_cmd->add_option("--registration-points", sim_o.registration_points, "Dots used for registration");
  sim_cmd->add_option("--noise", sim_o.noise, "Pixel noise standard deviation")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--seed", sim_o.seed, "Random seed");
  sim_cmd->add_option("--dot-radius", sim_o.dot_radius, "Rendered dot radius (px)")->check(CLI::Range(1, 64));
  sim_cmd->add_option("--width", sim_o.width, "Image width (px)")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--height", sim_o.height, "Image height (px)")->check(CLI::PositiveNumber);
  sim_cmd->add_flag("--distinct-poses", sim_o.distinct_poses,
                    "Give every rig entry its own physical pose");

  CalibrateOptions cal_o;
  auto* cal_cmd = app.add_subcommand("calibrate", "DLT calibration from correspondences");
  cal_cmd->add_option("--world", cal_o.world, "World points file")->required();
  cal_cmd->add_option("--image", cal_o.image, "Image points file")->required();
  cal_cmd->add_option("--out", cal_o.out, "Camera file to write")->required();
  cal_cmd->add_flag("--report", cal_o.report, "Print reprojection error summary");

  RegisterOptions reg_o;
  auto* reg_cmd = app.add_subcommand("register", "Register a camera into the global frame");
  reg_cmd->add_option("--pairs", reg_o.pairs, "Frame pairs file")->required();
  reg_cmd->add_option("--camera", reg_o.camera, "Camera file (local frame)")->required();
  reg_cmd->add_option("--out", reg_o.out, "Camera file to write")->required();

  UnifyOptions uni_o;
  auto* uni_cmd = app.add_subcommand("unify", "Project a global point through registered cameras");
  uni_cmd->add_option("--cameras", uni_o.cameras, "Registered camera files")->required()->expected(1, -1);
  uni_cmd->add_option("--point", uni_o.point, "Global point \"x y z\"")->required();
  uni_cmd->add_flag("--round", uni_o.round, "Round to integers before comparing");
  uni_cmd->add_flag("--pixel", uni_o.pixel, "Convert to frame-buffer pixels centred at (W/2, H/2)");
  uni_cmd->add_option("--width", uni_o.width, "Frame width for --pixel");
  uni_cmd->add_option("--height", uni_o.height, "Frame height for --pixel");

  DetectOptions det_o;
  auto* det_cmd = app.add_subcommand("detect", "Detect dark calibration dots in a PGM image");
  det_cmd->add_option("--image", det_o.image, "Input PGM")->required();
  det_cmd->add_option("--out", det_o.out, "Blob CSV to write")->required();
  det_cmd->add_option("--threshold", det_o.threshold, "Binarization threshold")->check(CLI::Range(0, 255));
  det_cmd->add_option("--radius", det_o.radius, "Background element radius")->check(CLI::Range(1, 1000));
  det_cmd->add_option("--min-pixels", det_o.min_pixels, "Smallest blob kept")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(sim_o, out);
    if (cal_cmd->parsed()) return run_calibrate(cal_o, out);
    if (reg_cmd->parsed()) return run_register(reg_o, out);
    if (uni_cmd->parsed()) return run_unify(uni_o, out, err);
    if (det_cmd->parsed()) return run_detect(det_o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(ErrorCode::IoError);
  }
  err << "usage error: no command given\n";
  return kUsageError;
}

}  // namespace mvcalib::cli
