#include "gspart/ply_io.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "gspart/error.h"

namespace gspart {

static_assert(std::endian::native == std::endian::little,
              "splat PLY I/O assumes a little-endian host");

namespace {

enum class ScalarType { kI8, kU8, kI16, kU16, kI32, kU32, kF32, kF64 };

bool parse_type(const std::string& name, ScalarType& t) {
  if (name == "char" || name == "int8") t = ScalarType::kI8;
  else if (name == "uchar" || name == "uint8") t = ScalarType::kU8;
  else if (name == "short" || name == "int16") t = ScalarType::kI16;
  else if (name == "ushort" || name == "uint16") t = ScalarType::kU16;
  else if (name == "int" || name == "int32") t = ScalarType::kI32;
  else if (name == "uint" || name == "uint32") t = ScalarType::kU32;
  else if (name == "float" || name == "float32") t = ScalarType::kF32;
  else if (name == "double" || name == "float64") t = ScalarType::kF64;
  else return false;
  return true;
}

std::size_t type_size(ScalarType t) {
  switch (t) {
    case ScalarType::kI8: case ScalarType::kU8: return 1;
    case ScalarType::kI16: case ScalarType::kU16: return 2;
    case ScalarType::kI32: case ScalarType::kU32: case ScalarType::kF32: return 4;
    case ScalarType::kF64: return 8;
  }
  return 0;
}

template <typename T>
T read_as(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double read_scalar(const char* p, ScalarType t) {
  switch (t) {
    case ScalarType::kI8: return read_as<std::int8_t>(p);
    case ScalarType::kU8: return read_as<std::uint8_t>(p);
    case ScalarType::kI16: return read_as<std::int16_t>(p);
    case ScalarType::kU16: return read_as<std::uint16_t>(p);
    case ScalarType::kI32: return read_as<std::int32_t>(p);
    case ScalarType::kU32: return read_as<std::uint32_t>(p);
    case ScalarType::kF32: return read_as<float>(p);
    case ScalarType::kF64: return read_as<double>(p);
  }
  return 0.0;
}

struct Property {
  std::string name;
  ScalarType type;
  std::size_t offset;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
  std::size_t stride = 0;
};

constexpr std::array<const char*, 11> kRequired = {
    "x", "y", "z", "opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<Gaussian3D> load_splat_ply(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  const std::string where = path.string() + ": ";
  auto parse_error = [&](std::size_t offset, const std::string& what) {
    return Error(ErrorCode::kParse, where + what + " at byte offset " + std::to_string(offset));
  };

  std::size_t pos = 0;
  auto next_line = [&](std::string& line) -> bool {
    const std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) return false;
    line = data.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end + 1;
    return true;
  };

  std::string line;
  if (!next_line(line) || line != "ply") throw parse_error(0, "missing 'ply' magic");
  std::vector<Element> elements;
  bool have_format = false;
  for (;;) {
    const std::size_t line_start = pos;
    if (!next_line(line)) throw parse_error(line_start, "header ends without 'end_header'");
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "end_header") break;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt != "binary_little_endian") {
        throw Error(ErrorCode::kFormat, where + "unsupported PLY format '" + fmt + "'");
      }
      have_format = true;
    } else if (keyword == "element") {
      Element e;
      long long count = -1;
      ls >> e.name >> count;
      if (e.name.empty() || count < 0 || ls.fail()) {
        throw parse_error(line_start, "malformed element line '" + line + "'");
      }
      e.count = static_cast<std::size_t>(count);
      elements.push_back(e);
    } else if (keyword == "property") {
      if (elements.empty()) throw parse_error(line_start, "property before any element");
      std::string type_name, name;
      ls >> type_name;
      if (type_name == "list") {
        throw Error(ErrorCode::kFormat,
                    where + "list properties are not supported (element '" +
                        elements.back().name + "')");
      }
      ls >> name;
      ScalarType t;
      if (name.empty() || !parse_type(type_name, t)) {
        throw parse_error(line_start, "malformed property line '" + line + "'");
      }
      Element& e = elements.back();
      e.properties.push_back({name, t, e.stride});
      e.stride += type_size(t);
    } else {
      throw parse_error(line_start, "unknown header keyword '" + keyword + "'");
    }
  }
  if (!have_format) throw parse_error(0, "missing format line");

  std::size_t offset = pos;
  const Element* vertex = nullptr;
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      vertex = &e;
      break;
    }
    offset += e.count * e.stride;
  }
  if (!vertex) throw Error(ErrorCode::kFormat, where + "no 'vertex' element");

  std::array<const Property*, kRequired.size()> props{};
  for (std::size_t k = 0; k < kRequired.size(); ++k) {
    for (const auto& p : vertex->properties) {
      if (p.name == kRequired[k]) props[k] = &p;
    }
    if (!props[k]) {
      throw Error(ErrorCode::kFormat,
                  where + "missing required vertex property '" + kRequired[k] + "'");
    }
  }
  const std::size_t needed = vertex->count * vertex->stride;
  if (offset > data.size() || data.size() - offset < needed) {
    throw parse_error(std::min(offset, data.size()),
                      "truncated vertex data: expected " + std::to_string(needed) +
                          " bytes, found " +
                          std::to_string(offset > data.size() ? 0 : data.size() - offset));
  }

  std::vector<std::array<double, kRequired.size()>> raw(vertex->count);
  bool opacity_logit = false;
  bool scale_log = false;
  for (std::size_t i = 0; i < vertex->count; ++i) {
    const char* rec = data.data() + offset + i * vertex->stride;
    for (std::size_t k = 0; k < kRequired.size(); ++k) {
      raw[i][k] = read_scalar(rec + props[k]->offset, props[k]->type);
      if (!std::isfinite(raw[i][k])) {
        throw parse_error(offset + i * vertex->stride + props[k]->offset,
                          std::string("non-finite value for '") + kRequired[k] + "'");
      }
    }
    if (raw[i][3] < 0.0 || raw[i][3] > 1.0) opacity_logit = true;
    if (raw[i][4] < 0.0 || raw[i][5] < 0.0 || raw[i][6] < 0.0) scale_log = true;
  }

  std::vector<Gaussian3D> out;
  out.reserve(vertex->count);
  for (std::size_t i = 0; i < vertex->count; ++i) {
    const auto& r = raw[i];
    Gaussian3D g;
    g.position = {r[0], r[1], r[2]};
    g.opacity = opacity_logit ? 1.0 / (1.0 + std::exp(-r[3])) : r[3];
    g.scale = {r[4], r[5], r[6]};
    if (scale_log) g.scale = g.scale.array().exp();
    Eigen::Quaterniond q(r[7], r[8], r[9], r[10]);
    if (!(q.norm() > 0.0)) {
      throw Error(ErrorCode::kFormat, where + "vertex " + std::to_string(i) + " has a zero quaternion");
    }
    g.rotation = q.normalized();
    try {
      g.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormat, where + "vertex " + std::to_string(i) + ": " + e.what());
    }
    out.push_back(g);
  }
  return out;
}

void save_splat_ply(std::span<const Gaussian3D> gaussians, const std::filesystem::path& path) {
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\n";
  header << "element vertex " << gaussians.size() << '\n';
  for (const char* name : kRequired) header << "property float " << name << '\n';
  header << "end_header\n";

  std::string body;
  body.reserve(gaussians.size() * kRequired.size() * sizeof(float));
  auto put = [&](double v) {
    const float f = static_cast<float>(v);
    char buf[sizeof(float)];
    std::memcpy(buf, &f, sizeof(float));
    body.append(buf, sizeof(float));
  };
  for (const auto& g : gaussians) {
    put(g.position.x()); put(g.position.y()); put(g.position.z());
    put(g.opacity);
    put(g.scale.x()); put(g.scale.y()); put(g.scale.z());
    put(g.rotation.w()); put(g.rotation.x()); put(g.rotation.y()); put(g.rotation.z());
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace gspart
