#include "gspart/colmap_io.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <Eigen/Geometry>

#include "gspart/error.h"

namespace gspart {

namespace {

struct Intrinsics {
  int width = 0;
  int height = 0;
  double fx = 0, fy = 0, cx = 0, cy = 0;
};

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool blank_or_comment(const std::string& line) {
  const auto first = line.find_first_not_of(" \t");
  return first == std::string::npos || line[first] == '#';
}

std::map<int, Intrinsics> parse_cameras(const std::filesystem::path& path) {
  std::map<int, Intrinsics> out;
  const auto lines = read_lines(path);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (blank_or_comment(lines[k])) continue;
    const std::string where = path.string() + ":" + std::to_string(k + 1) + ": ";
    std::istringstream ls(lines[k]);
    int id = 0;
    std::string model;
    Intrinsics in;
    if (!(ls >> id >> model >> in.width >> in.height)) {
      throw Error(ErrorCode::kParse, where + "expected 'ID MODEL WIDTH HEIGHT PARAMS'");
    }
    if (model == "SIMPLE_PINHOLE") {
      double f = 0;
      if (!(ls >> f >> in.cx >> in.cy)) throw Error(ErrorCode::kParse, where + "SIMPLE_PINHOLE needs f cx cy");
      in.fx = in.fy = f;
    } else if (model == "PINHOLE") {
      if (!(ls >> in.fx >> in.fy >> in.cx >> in.cy)) {
        throw Error(ErrorCode::kParse, where + "PINHOLE needs fx fy cx cy");
      }
    } else {
      throw Error(ErrorCode::kFormat, where + "unsupported camera model '" + model + "'");
    }
    if (!out.emplace(id, in).second) {
      throw Error(ErrorCode::kConsistency, where + "duplicate camera id " + std::to_string(id));
    }
  }
  return out;
}

}  // namespace

std::vector<CameraView> load_colmap_cameras(const std::filesystem::path& dir,
                                            const ColmapLoadOptions& options) {
  const auto intrinsics = parse_cameras(dir / "cameras.txt");
  const auto images_path = dir / "images.txt";
  const auto lines = read_lines(images_path);
  std::vector<CameraView> out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (blank_or_comment(lines[k])) continue;
    const std::string where = images_path.string() + ":" + std::to_string(k + 1) + ": ";
    std::istringstream ls(lines[k]);
    int image_id = 0, camera_id = 0;
    double qw, qx, qy, qz, tx, ty, tz;
    std::string name;
    if (!(ls >> image_id >> qw >> qx >> qy >> qz >> tx >> ty >> tz >> camera_id >> name)) {
      throw Error(ErrorCode::kParse,
                  where + "expected 'IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME'");
    }
    const auto it = intrinsics.find(camera_id);
    if (it == intrinsics.end()) {
      throw Error(ErrorCode::kConsistency, where + "image " + std::to_string(image_id) +
                                               " references unknown camera id " +
                                               std::to_string(camera_id));
    }
    Eigen::Quaterniond q(qw, qx, qy, qz);
    if (!(q.norm() > 0.0)) throw Error(ErrorCode::kParse, where + "zero quaternion");
    CameraView cam;
    cam.id = image_id;
    cam.fx = it->second.fx;
    cam.fy = it->second.fy;
    cam.cx = it->second.cx;
    cam.cy = it->second.cy;
    cam.width = it->second.width;
    cam.height = it->second.height;
    cam.rotation = q.normalized().toRotationMatrix();
    cam.translation = {tx, ty, tz};
    cam.z_near = options.z_near;
    cam.z_far = options.z_far;
    cam.validate();
    out.push_back(cam);
    ++k;  // the following line lists 2D points, possibly empty
  }
  return out;
}

void write_colmap_cameras(std::span<const CameraView> cameras, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());

  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::ofstream cams(dir / "cameras.txt", std::ios::trunc);
  std::ofstream imgs(dir / "images.txt", std::ios::trunc);
  if (!cams || !imgs) throw Error(ErrorCode::kIo, "cannot write camera files in '" + dir.string() + "'");
  cams << "# Camera list with one line of data per camera:\n"
       << "#   CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n"
       << "# Number of cameras: " << cameras.size() << '\n';
  imgs << "# Image list with two lines of data per image:\n"
       << "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n"
       << "#   POINTS2D[] as (X, Y, POINT3D_ID)\n"
       << "# Number of images: " << cameras.size() << '\n';
  for (const auto& c : cameras) {
    cams << c.id << " PINHOLE " << c.width << ' ' << c.height << ' ' << fmt(c.fx) << ' '
         << fmt(c.fy) << ' ' << fmt(c.cx) << ' ' << fmt(c.cy) << '\n';
    Eigen::Quaterniond q(c.rotation);
    q.normalize();
    if (q.w() < 0) q.coeffs() *= -1.0;
    char name[32];
    std::snprintf(name, sizeof(name), "view_%05d.png", c.id);
    imgs << c.id << ' ' << fmt(q.w()) << ' ' << fmt(q.x()) << ' ' << fmt(q.y()) << ' '
         << fmt(q.z()) << ' ' << fmt(c.translation.x()) << ' ' << fmt(c.translation.y()) << ' '
         << fmt(c.translation.z()) << ' ' << c.id << ' ' << name << "\n\n";
  }
  if (!cams || !imgs) throw Error(ErrorCode::kIo, "write failed in '" + dir.string() + "'");
}

}  // namespace gspart
