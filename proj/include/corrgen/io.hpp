#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "corrgen/corridor.hpp"
#include "corrgen/engine.hpp"
#include "corrgen/error.hpp"
#include "corrgen/path.hpp"
#include "corrgen/projection.hpp"

namespace corrgen {

namespace fs = std::filesystem;
using Json = nlohmann::json;

/// Binary cloud layout: 8-byte magic, uint64 point count, then count
/// float32 (x, y, z) triplets. Everything little-endian.
inline constexpr std::array<char, 8> kCloudMagic = {'C', 'R', 'G', 'N', 'P', 'C', 'D', '1'};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_number(std::string_view field, std::size_t line) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("not a number: '" + std::string(field) + "'", line);
  }
  return v;
}

inline std::ifstream open_in(const fs::path& file, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(file, mode);
  if (!in) throw InputError("cannot open '" + file.string() + "' for reading");
  return in;
}

inline std::ofstream open_out(const fs::path& file, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(file, mode);
  if (!out) throw InputError("cannot open '" + file.string() + "' for writing");
  return out;
}

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

}  // namespace detail

/// CSV cloud: header `x,y,z` (or `x,y` for planar clouds), one point per
/// row. Blank lines are skipped.
inline RawCloud parse_cloud_csv(std::istream& in) {
  RawCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto fields = detail::split_commas(row);
    if (columns == 0) {
      if (fields.size() == 3 && fields[0] == "x" && fields[1] == "y" && fields[2] == "z") {
        columns = 3;
      } else if (fields.size() == 2 && fields[0] == "x" && fields[1] == "y") {
        columns = 2;
        cloud.planar = true;
      } else {
        throw ParseError("expected header 'x,y,z' or 'x,y'", lineno);
      }
      continue;
    }
    if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()), lineno);
    }
    Vec3 p = Vec3::Zero();
    for (std::size_t k = 0; k < columns; ++k) p[static_cast<Eigen::Index>(k)] = detail::parse_number(fields[k], lineno);
    if (!p.allFinite()) throw InputError("line " + std::to_string(lineno) + ": non-finite coordinate");
    cloud.points.push_back(p);
  }
  if (columns == 0) throw ParseError("missing header 'x,y,z'", lineno + 1);
  return cloud;
}

inline RawCloud parse_cloud_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kCloudMagic) throw ParseError("bad binary cloud magic", 0);
  std::uint64_t count = 0;
  if (!in.read(reinterpret_cast<char*>(&count), sizeof(count))) throw ParseError("truncated binary cloud header", 0);
  count = detail::to_little(count);
  RawCloud cloud;
  std::vector<float> buf(3 * 65536);
  std::uint64_t done = 0;
  while (done < count) {
    const std::uint64_t chunk = std::min<std::uint64_t>(count - done, 65536);
    const auto bytes = static_cast<std::streamsize>(chunk * 3 * sizeof(float));
    if (!in.read(reinterpret_cast<char*>(buf.data()), bytes)) {
      throw ParseError("truncated binary cloud: expected " + std::to_string(count) + " points", 0);
    }
    for (std::uint64_t i = 0; i < chunk; ++i) {
      Vec3 p(detail::to_little(buf[3 * i]), detail::to_little(buf[3 * i + 1]), detail::to_little(buf[3 * i + 2]));
      if (!p.allFinite()) throw InputError("non-finite coordinate at point " + std::to_string(done + i));
      cloud.points.push_back(p);
    }
    done += chunk;
  }
  return cloud;
}

/// Reads a CSV or binary cloud; the format is detected from the magic.
inline RawCloud load_cloud(const fs::path& file) {
  std::ifstream in = detail::open_in(file, std::ios::in | std::ios::binary);
  std::array<char, 8> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == static_cast<std::streamsize>(head.size()) && head == kCloudMagic;
  in.clear();
  in.seekg(0);
  return binary ? parse_cloud_binary(in) : parse_cloud_csv(in);
}

inline void write_cloud_csv(std::ostream& out, const RawCloud& cloud) {
  out << (cloud.planar ? "x,y\n" : "x,y,z\n");
  char buf[96];
  for (const auto& p : cloud.points) {
    const int n = cloud.planar ? std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", p.x(), p.y())
                               : std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", p.x(), p.y(), p.z());
    out.write(buf, n);
  }
}

inline void save_cloud_csv(const fs::path& file, const RawCloud& cloud) {
  std::ofstream out = detail::open_out(file);
  write_cloud_csv(out, cloud);
  if (!out) throw InputError("failed writing '" + file.string() + "'");
}

/// Binary export; coordinates are narrowed to float32.
inline void save_cloud_binary(const fs::path& file, const RawCloud& cloud) {
  std::ofstream out = detail::open_out(file, std::ios::out | std::ios::binary);
  out.write(kCloudMagic.data(), kCloudMagic.size());
  const std::uint64_t count = detail::to_little(static_cast<std::uint64_t>(cloud.points.size()));
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  std::vector<float> buf;
  buf.reserve(3 * cloud.points.size());
  for (const auto& p : cloud.points) {
    for (int k = 0; k < 3; ++k) buf.push_back(detail::to_little(static_cast<float>(p[k])));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw InputError("failed writing '" + file.string() + "'");
}

// ---------------------------------------------------------------- paths

namespace detail {

inline Json read_json(const fs::path& file) {
  std::ifstream in = open_in(file);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what(), 0);
  }
}

inline Vec3 vec3_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ParseError(std::string(what) + " must be an array of 3 numbers", 0);
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[static_cast<std::size_t>(k)].is_number()) throw ParseError(std::string(what) + " must be an array of 3 numbers", 0);
    v[k] = j[static_cast<std::size_t>(k)].get<double>();
  }
  if (!v.allFinite()) throw InputError(std::string(what) + " is not finite");
  return v;
}

inline std::vector<double> numbers_from(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw ParseError("missing array '" + key + "'", 0);
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ParseError("'" + key + "' must contain only numbers", 0);
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

inline Json path_to_json(const ParametricPath& path) {
  Json stations = Json::array();
  for (const auto& s : path.stations()) {
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rot.push_back(s.rotation(r, c));
    stations.push_back({{"xi", s.xi}, {"position", {s.position.x(), s.position.y(), s.position.z()}}, {"rotation_rowmajor", rot}});
  }
  return Json{{"stations", stations}};
}

/// Accepts {"waypoints": [[x,y,z],...]} or {"stations": [...]}.
inline ParametricPath path_from_json(const Json& j, int samples_per_segment = 50) {
  if (!j.is_object()) throw ParseError("path file must hold a JSON object", 0);
  if (j.contains("waypoints")) {
    std::vector<Vec3> wps;
    for (const auto& w : j.at("waypoints")) wps.push_back(detail::vec3_from(w, "waypoint"));
    return build_path_from_waypoints(wps, samples_per_segment);
  }
  if (j.contains("stations")) {
    std::vector<FrameStation> st;
    for (const auto& s : j.at("stations")) {
      if (!s.is_object() || !s.contains("xi") || !s.contains("position") || !s.contains("rotation_rowmajor")) {
        throw ParseError("station needs xi, position and rotation_rowmajor", 0);
      }
      FrameStation f;
      if (!s.at("xi").is_number()) throw ParseError("station xi must be a number", 0);
      f.xi = s.at("xi").get<double>();
      f.position = detail::vec3_from(s.at("position"), "station position");
      const auto rot = detail::numbers_from(s, "rotation_rowmajor");
      if (rot.size() != 9) throw ParseError("rotation_rowmajor needs 9 numbers", 0);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) f.rotation(r, c) = rot[static_cast<std::size_t>(3 * r + c)];
      st.push_back(f);
    }
    return ParametricPath::from_stations(std::move(st));
  }
  throw ParseError("path file needs 'waypoints' or 'stations'", 0);
}

inline ParametricPath load_path(const fs::path& file, int samples_per_segment = 50) {
  return path_from_json(detail::read_json(file), samples_per_segment);
}

inline void save_path(const fs::path& file, const ParametricPath& path) {
  std::ofstream out = detail::open_out(file);
  out << path_to_json(path).dump(1) << '\n';
}

inline void save_waypoints(const fs::path& file, const std::vector<Vec3>& waypoints) {
  Json wps = Json::array();
  for (const auto& w : waypoints) wps.push_back({w.x(), w.y(), w.z()});
  std::ofstream out = detail::open_out(file);
  out << Json{{"waypoints", wps}}.dump(1) << '\n';
}

// ------------------------------------------------------------ corridors

using AnyCorridor = std::variant<Corridor3D, Corridor2D>;

inline int corridor_dim(const AnyCorridor& c) { return std::holds_alternative<Corridor3D>(c) ? 3 : 2; }

/// Corridor JSON. The reference path, when attached, is embedded under
/// "path" in the stations form so the file is self-contained.
inline Json corridor_to_json(const Corridor3D& c) {
  const Domain dom = c.domain();
  Json j{{"dim", 3}, {"degree", c.degree()}, {"xi_range", {dom.lo, dom.hi}}, {"basis", "chebyshev"},
         {"e11", c.e11.coeffs()}, {"e12", c.e12.coeffs()}, {"e22", c.e22.coeffs()},
         {"d1", c.d1.coeffs()}, {"d2", c.d2.coeffs()}};
  if (c.path) j["path"] = path_to_json(*c.path);
  return j;
}

inline Json corridor_to_json(const Corridor2D& c) {
  const Domain dom = c.domain();
  Json j{{"dim", 2}, {"degree", c.degree()}, {"xi_range", {dom.lo, dom.hi}}, {"basis", "chebyshev"},
         {"b_plus", c.b_plus.coeffs()}, {"b_minus", c.b_minus.coeffs()}};
  if (c.path) j["path"] = path_to_json(*c.path);
  return j;
}

inline AnyCorridor corridor_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("corridor file must hold a JSON object", 0);
  for (const char* key : {"dim", "degree", "xi_range", "basis"}) {
    if (!j.contains(key)) throw ParseError(std::string("corridor is missing '") + key + "'", 0);
  }
  if (j.at("basis") != "chebyshev") throw ParseError("unsupported basis (expected \"chebyshev\")", 0);
  if (!j.at("dim").is_number_integer() || !j.at("degree").is_number_integer()) throw ParseError("dim and degree must be integers", 0);
  const int dim = j.at("dim").get<int>();
  const int degree = j.at("degree").get<int>();
  if (dim != 2 && dim != 3) throw ParseError("dim must be 2 or 3", 0);
  if (degree < 0) throw ParseError("degree must be non-negative", 0);
  const auto range = detail::numbers_from(j, "xi_range");
  if (range.size() != 2 || !(range[0] < range[1])) throw ParseError("xi_range must be [lo, hi] with lo < hi", 0);
  const Domain dom{range[0], range[1]};
  const auto poly = [&](const char* key) {
    auto c = detail::numbers_from(j, key);
    if (c.size() != static_cast<std::size_t>(degree + 1)) {
      throw ParseError(std::string("'") + key + "' needs degree+1 = " + std::to_string(degree + 1) + " coefficients", 0);
    }
    for (double v : c)
      if (!std::isfinite(v)) throw InputError(std::string("'") + key + "' has a non-finite coefficient");
    return ChebyshevPoly(std::move(c), dom);
  };
  std::shared_ptr<const ParametricPath> path;
  if (j.contains("path")) {
    path = std::make_shared<const ParametricPath>(path_from_json(j.at("path")));
    const Domain pd = path->domain();
    if (std::abs(pd.lo - dom.lo) > dom.slack() || std::abs(pd.hi - dom.hi) > dom.slack()) {
      throw ParseError("embedded path domain does not match xi_range", 0);
    }
  }
  if (dim == 3) return Corridor3D{poly("e11"), poly("e12"), poly("e22"), poly("d1"), poly("d2"), path};
  return Corridor2D{poly("b_plus"), poly("b_minus"), path};
}

inline void save_corridor(const fs::path& file, const AnyCorridor& c) {
  std::ofstream out = detail::open_out(file);
  const Json j = std::visit([](const auto& v) { return corridor_to_json(v); }, c);
  out << j.dump(1) << '\n';
  if (!out) throw InputError("failed writing '" + file.string() + "'");
}

inline AnyCorridor load_corridor(const fs::path& file) { return corridor_from_json(detail::read_json(file)); }

// ---------------------------------------------------------------- other

inline void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  char buf[128];
  for (const auto& v : mesh.vertices) {
    const int n = std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out.write(buf, n);
  }
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline void save_obj(const fs::path& file, const TriangleMesh& mesh) {
  std::ofstream out = detail::open_out(file);
  write_obj(out, mesh);
  if (!out) throw InputError("failed writing '" + file.string() + "'");
}

inline Json report_to_json(const SolveReport& r) {
  const auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return Json{{"status", r.status},
              {"dim", r.dimension},
              {"degree", r.degree},
              {"formulation", r.formulation},
              {"objective", num(r.objective)},
              {"volume", num(r.volume)},
              {"solve_ms", r.solve_ms},
              {"assembly_ms", r.assembly_ms},
              {"constraints", r.constraints},
              {"points", r.points},
              {"min_point_value", num(r.min_point_value)},
              {"min_definiteness", num(r.min_definiteness)},
              {"gap_bound", num(r.gap_bound)},
              {"iterations", r.newton_steps}};
}

}  // namespace corrgen
