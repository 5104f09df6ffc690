#pragma once

// File formats and batch evaluation.
//
// Box file: one JSON object per line,
//   {"id":"a","center":[x,y,z],"rotation":{"matrix":[9 numbers, row-major]},
//    "dimensions":[dx,dy,dz]}
// with rotation alternatively {"quaternion":[w,x,y,z]} or
// {"euler_xyz":[rx,ry,rz]} (radians, intrinsic X-Y-Z). Blank lines and lines
// starting with '#' are skipped.
//
// Pairs file: one JSON object per line, {"a":"<id>","b":"<id>"} with an
// optional "cloud":"<path>".
//
// Point cloud: "x y z" per line, or ascii PLY with x, y, z vertex properties.
//
// Report: one JSON object per job, keys in a fixed order, numbers printed
// with 12 significant digits.

#include "boxmetrics/core.hpp"
#include "boxmetrics/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <variant>
#include <vector>

namespace boxmetrics::io {

inline constexpr const char* kToolName = "boxmetrics";
inline constexpr const char* kVersion = "1.0.0";

class ParseError : public std::runtime_error {
public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}
  std::size_t line() const { return line_; }
  const std::string& source() const { return source_; }

private:
  std::string source_;
  std::size_t line_;
};

class InvalidBoxRecord : public std::runtime_error {
public:
  InvalidBoxRecord(std::string id, const std::string& reason)
      : std::runtime_error("invalid box '" + id + "': " + reason), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

private:
  std::string id_;
};

struct RotationMatrix {
  std::array<double, 9> row_major;
};
struct RotationQuaternion {
  std::array<double, 4> wxyz;
};
struct RotationEuler {
  std::array<double, 3> xyz;
};
using RotationSpec = std::variant<RotationMatrix, RotationQuaternion, RotationEuler>;

struct BoxRecord {
  std::string id;
  std::array<double, 3> center{};
  RotationSpec rotation = RotationMatrix{{1, 0, 0, 0, 1, 0, 0, 0, 1}};
  std::array<double, 3> dimensions{};
};

/// Converts to an OrientedBox; throws InvalidBoxRecord on bad dimensions or
/// a rotation that is not normalizable within 1e-6.
inline OrientedBox to_box(const BoxRecord& rec) {
  const Vec3 c(rec.center[0], rec.center[1], rec.center[2]);
  const Vec3 d(rec.dimensions[0], rec.dimensions[1], rec.dimensions[2]);
  try {
    return std::visit(
        [&](const auto& r) -> OrientedBox {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, RotationMatrix>) {
            Mat3 m;
            m << r.row_major[0], r.row_major[1], r.row_major[2], r.row_major[3], r.row_major[4],
                r.row_major[5], r.row_major[6], r.row_major[7], r.row_major[8];
            return {c, m, d};
          } else if constexpr (std::is_same_v<T, RotationQuaternion>) {
            return OrientedBox::from_quaternion(
                c, Eigen::Vector4d(r.wxyz[0], r.wxyz[1], r.wxyz[2], r.wxyz[3]), d);
          } else {
            return OrientedBox::from_euler_xyz(c, Vec3(r.xyz[0], r.xyz[1], r.xyz[2]), d);
          }
        },
        rec.rotation);
  } catch (const InvalidBox& e) {
    throw InvalidBoxRecord(rec.id, e.what());
  }
}

/// Record with the box's normalized rotation written as a row-major matrix.
inline BoxRecord to_record(const std::string& id, const OrientedBox& box) {
  BoxRecord rec;
  rec.id = id;
  for (int k = 0; k < 3; ++k) {
    rec.center[k] = box.center()[k];
    rec.dimensions[k] = box.dimensions()[k];
  }
  RotationMatrix m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m.row_major[3 * r + c] = box.rotation()(r, c);
  rec.rotation = m;
  return rec;
}

namespace detail {

template <std::size_t N>
std::array<double, N> number_array(const nlohmann::json& j, const char* field) {
  if (!j.is_array() || j.size() != N)
    throw std::invalid_argument(std::string("field '") + field + "' must be an array of " +
                                std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[i].is_number())
      throw std::invalid_argument(std::string("field '") + field + "' must contain numbers");
    out[i] = j[i].get<double>();
  }
  return out;
}

inline bool skippable(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

}  // namespace detail

/// Parses one box record from a JSON object.
inline BoxRecord parse_box_record(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("record must be an object");
  BoxRecord rec;
  if (!j.contains("id") || !j["id"].is_string()) throw std::invalid_argument("missing string 'id'");
  rec.id = j["id"].get<std::string>();
  if (!j.contains("center")) throw std::invalid_argument("missing 'center'");
  rec.center = detail::number_array<3>(j["center"], "center");
  if (!j.contains("dimensions")) throw std::invalid_argument("missing 'dimensions'");
  rec.dimensions = detail::number_array<3>(j["dimensions"], "dimensions");
  if (!j.contains("rotation") || !j["rotation"].is_object() || j["rotation"].size() != 1)
    throw std::invalid_argument("'rotation' must be an object with exactly one of "
                                "matrix, quaternion, euler_xyz");
  const auto& r = j["rotation"];
  if (r.contains("matrix"))
    rec.rotation = RotationMatrix{detail::number_array<9>(r["matrix"], "matrix")};
  else if (r.contains("quaternion"))
    rec.rotation = RotationQuaternion{detail::number_array<4>(r["quaternion"], "quaternion")};
  else if (r.contains("euler_xyz"))
    rec.rotation = RotationEuler{detail::number_array<3>(r["euler_xyz"], "euler_xyz")};
  else
    throw std::invalid_argument("unknown rotation format");
  return rec;
}

/// Parses a line-delimited box file. Records are validated as boxes; order
/// is preserved and duplicate ids are rejected.
inline std::vector<BoxRecord> parse_box_stream(std::istream& in, const std::string& source) {
  std::vector<BoxRecord> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    BoxRecord rec;
    try {
      rec = parse_box_record(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw ParseError(source, lineno, e.what());
    }
    if (!ids.insert(rec.id).second) throw ParseError(source, lineno, "duplicate id '" + rec.id + "'");
    try {
      to_box(rec);
    } catch (const InvalidBoxRecord& e) {
      throw ParseError(source, lineno, e.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<BoxRecord> parse_box_file(const std::string& path) {
  auto in = detail::open_or_throw(path);
  return parse_box_stream(in, path);
}

inline std::string serialize_box_record(const BoxRecord& rec) {
  nlohmann::json j;
  j["id"] = rec.id;
  j["center"] = rec.center;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, RotationMatrix>)
          j["rotation"] = {{"matrix", r.row_major}};
        else if constexpr (std::is_same_v<T, RotationQuaternion>)
          j["rotation"] = {{"quaternion", r.wxyz}};
        else
          j["rotation"] = {{"euler_xyz", r.xyz}};
      },
      rec.rotation);
  j["dimensions"] = rec.dimensions;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Point clouds
// ---------------------------------------------------------------------------

namespace detail {

inline bool parse_doubles(const std::string& text, std::vector<double>& out) {
  out.clear();
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      return false;
    }
    if (used != tok.size() || !std::isfinite(v)) return false;
    out.push_back(v);
  }
  return true;
}

inline PointCloud parse_ply(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 1;  // "ply" already consumed
  long long vertex_count = -1;
  bool in_vertex = false;
  std::vector<std::string> props;
  // Elements listed before "vertex" have to be skipped line by line.
  long long lines_before_vertex = 0;
  bool vertex_seen = false;
  while (true) {
    if (!std::getline(in, line)) throw ParseError(source, lineno, "PLY header not terminated");
    ++lineno;
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "ascii") throw ParseError(source, lineno, "only ascii PLY is supported");
    } else if (kw == "element") {
      std::string name;
      long long count = -1;
      ss >> name >> count;
      if (count < 0) throw ParseError(source, lineno, "bad element count");
      in_vertex = name == "vertex";
      if (in_vertex) {
        vertex_count = count;
        vertex_seen = true;
      } else if (!vertex_seen) {
        lines_before_vertex += count;
      }
    } else if (kw == "property") {
      if (in_vertex) {
        std::string type, name;
        ss >> type;
        if (type == "list") throw ParseError(source, lineno, "list properties on vertex unsupported");
        ss >> name;
        props.push_back(name);
      }
    } else if (kw == "end_header") {
      break;
    } else if (kw != "comment" && kw != "obj_info" && !kw.empty()) {
      throw ParseError(source, lineno, "unexpected PLY header keyword '" + kw + "'");
    }
  }
  if (vertex_count < 0) throw ParseError(source, lineno, "PLY has no vertex element");
  auto index_of = [&](const char* name) -> std::size_t {
    const auto it = std::find(props.begin(), props.end(), name);
    if (it == props.end()) throw ParseError(source, lineno, std::string("PLY vertex lacks '") + name + "'");
    return static_cast<std::size_t>(it - props.begin());
  };
  const std::size_t ix = index_of("x"), iy = index_of("y"), iz = index_of("z");

  for (long long i = 0; i < lines_before_vertex; ++i) {
    if (!std::getline(in, line)) throw ParseError(source, lineno, "truncated PLY body");
    ++lineno;
  }
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(vertex_count));
  std::vector<double> vals;
  for (long long i = 0; i < vertex_count; ++i) {
    if (!std::getline(in, line)) throw ParseError(source, lineno, "truncated PLY vertex list");
    ++lineno;
    if (!parse_doubles(line, vals) || vals.size() != props.size())
      throw ParseError(source, lineno, "malformed vertex " + std::to_string(i));
    cloud.points.emplace_back(vals[ix], vals[iy], vals[iz]);
  }
  return cloud;
}

}  // namespace detail

/// XYZ text ("x y z" per line, '#' comments) or ascii PLY.
inline PointCloud parse_point_cloud_stream(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  PointCloud cloud;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && (line == "ply" || line == "ply\r")) return detail::parse_ply(in, source);
    if (detail::skippable(line)) continue;
    if (!detail::parse_doubles(line, vals) || vals.size() != 3)
      throw ParseError(source, lineno, "expected three numbers 'x y z'");
    cloud.points.emplace_back(vals[0], vals[1], vals[2]);
  }
  return cloud;
}

inline PointCloud parse_point_cloud(const std::string& path) {
  auto in = detail::open_or_throw(path);
  return parse_point_cloud_stream(in, path);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct MetricSelection {
  bool iou = true, v2v = true, bbd = true, position = true, size = true, rotation = true,
       point_iou = true;

  /// Comma-separated subset of: iou, v2v, bbd, position, size, rotation,
  /// point_iou, all.
  static MetricSelection parse(const std::string& list) {
    MetricSelection s{false, false, false, false, false, false, false};
    std::stringstream ss(list);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      any = true;
      if (item == "all") s = MetricSelection{};
      else if (item == "iou") s.iou = true;
      else if (item == "v2v") s.v2v = true;
      else if (item == "bbd") s.bbd = true;
      else if (item == "position") s.position = true;
      else if (item == "size") s.size = true;
      else if (item == "rotation") s.rotation = true;
      else if (item == "point_iou") s.point_iou = true;
      else throw std::invalid_argument("unknown metric '" + item + "'");
    }
    if (!any) throw std::invalid_argument("empty metric list");
    return s;
  }
};

struct RunOptions {
  double tol = kDefaultTol;
  MetricSelection metrics;
  unsigned workers = 1;
};

/// %.12g, with non-finite values written as null.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

namespace detail {

class ObjectWriter {
public:
  ObjectWriter& raw(const char* key, const std::string& value) {
    out_ += first_ ? "{" : ",";
    first_ = false;
    out_ += '"';
    out_ += key;
    out_ += "\":";
    out_ += value;
    return *this;
  }
  ObjectWriter& num(const char* key, double v) { return raw(key, format_number(v)); }
  ObjectWriter& str(const char* key, const std::string& v) { return raw(key, json_string(v)); }
  std::string finish() { return first_ ? "{}" : out_ + "}"; }

private:
  std::string out_;
  bool first_ = true;
};

inline std::string pair_object(const DifferencePair& d) {
  return ObjectWriter().num("abs", d.abs).num("squared", d.squared).finish();
}

inline std::string warnings_array(const std::vector<std::string>& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + json_string(w[i]);
  return s + "]";
}

}  // namespace detail

/// One report line. Field order: tool, version, tol, [job], a, b, selected
/// metrics, warnings.
inline std::string serialize_report(const MetricReport& r, const std::string& id_a,
                                    const std::string& id_b, const RunOptions& opt,
                                    std::optional<std::size_t> job = std::nullopt) {
  detail::ObjectWriter w;
  w.str("tool", kToolName).str("version", kVersion).num("tol", opt.tol);
  if (job) w.raw("job", std::to_string(*job));
  w.str("a", id_a).str("b", id_b);
  const auto& m = opt.metrics;
  if (m.iou) w.num("iou", r.iou);
  if (m.v2v) w.num("v2v", r.v2v);
  if (m.bbd) w.num("bbd", r.bbd);
  if (m.position) w.raw("position_diff", detail::pair_object(r.position_diff));
  if (m.size) w.raw("size_diff", detail::pair_object(r.size_diff));
  if (m.rotation) {
    const auto& e = r.rotation.euler_diff;
    w.raw("rotation", detail::ObjectWriter()
                          .raw("euler_diff", "[" + format_number(e[0]) + "," + format_number(e[1]) +
                                                 "," + format_number(e[2]) + "]")
                          .num("quaternion_dist", r.rotation.quaternion_dist)
                          .num("matrix_geodesic", r.rotation.matrix_geodesic)
                          .finish());
  }
  if (m.point_iou) w.raw("point_iou", r.point_iou ? format_number(*r.point_iou) : "null");
  w.raw("warnings", detail::warnings_array(r.warnings));
  return w.finish();
}

inline std::string run_pair(const BoxRecord& a, const BoxRecord& b, const RunOptions& opt,
                            const PointCloud* cloud = nullptr) {
  const MetricReport r = full_report(to_box(a), to_box(b), cloud, opt.tol);
  return serialize_report(r, a.id, b.id, opt);
}

// ---------------------------------------------------------------------------
// Batch
// ---------------------------------------------------------------------------

struct PairJob {
  std::string a;
  std::string b;
  std::optional<std::string> cloud_path;
};

inline std::vector<PairJob> parse_pairs_stream(std::istream& in, const std::string& source) {
  std::vector<PairJob> jobs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object() || !j.contains("a") || !j.contains("b") || !j["a"].is_string() ||
          !j["b"].is_string())
        throw std::invalid_argument("pair needs string fields 'a' and 'b'");
      PairJob job{j["a"].get<std::string>(), j["b"].get<std::string>(), std::nullopt};
      if (j.contains("cloud")) {
        if (!j["cloud"].is_string()) throw std::invalid_argument("'cloud' must be a string");
        job.cloud_path = j["cloud"].get<std::string>();
      }
      jobs.push_back(std::move(job));
    } catch (const std::exception& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return jobs;
}

inline std::vector<PairJob> parse_pairs_file(const std::string& path) {
  auto in = detail::open_or_throw(path);
  return parse_pairs_stream(in, path);
}

struct BatchResult {
  std::vector<std::string> lines;  // one per job, then the summary line
  std::size_t errors = 0;
  int exit_code() const { return errors == 0 ? 0 : 1; }
};

/// Evaluates every job, up to opt.workers at a time. Output order follows
/// job order; a failing job produces an in-stream error record and the batch
/// continues. Clouds are loaded once per distinct path.
inline BatchResult run_batch(const std::vector<BoxRecord>& boxes, const std::vector<PairJob>& jobs,
                             const RunOptions& opt) {
  std::map<std::string, const BoxRecord*> by_id;
  for (const auto& b : boxes) by_id.emplace(b.id, &b);

  struct CloudEntry {
    std::optional<PointCloud> cloud;
    std::string error;
  };
  std::map<std::string, CloudEntry> clouds;
  for (const auto& job : jobs) {
    if (!job.cloud_path || clouds.count(*job.cloud_path)) continue;
    CloudEntry entry;
    try {
      entry.cloud = parse_point_cloud(*job.cloud_path);
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    clouds.emplace(*job.cloud_path, std::move(entry));
  }

  struct Outcome {
    std::string line;
    bool ok = false;
    double iou = 0.0;
    double bbd = 0.0;
  };
  std::vector<Outcome> outcomes(jobs.size());

  auto evaluate = [&](std::size_t i) {
    const PairJob& job = jobs[i];
    Outcome& o = outcomes[i];
    auto error_line = [&](const std::string& msg) {
      o.line = detail::ObjectWriter()
                   .raw("job", std::to_string(i))
                   .str("a", job.a)
                   .str("b", job.b)
                   .str("error", msg)
                   .finish();
    };
    const auto ia = by_id.find(job.a);
    const auto ib = by_id.find(job.b);
    if (ia == by_id.end() || ib == by_id.end()) {
      error_line("unknown box id '" + (ia == by_id.end() ? job.a : job.b) + "'");
      return;
    }
    const PointCloud* cloud = nullptr;
    if (job.cloud_path) {
      const CloudEntry& entry = clouds.at(*job.cloud_path);
      if (!entry.cloud) {
        error_line(entry.error);
        return;
      }
      cloud = &*entry.cloud;
    }
    try {
      const MetricReport r = full_report(to_box(*ia->second), to_box(*ib->second), cloud, opt.tol);
      o.line = serialize_report(r, job.a, job.b, opt, i);
      o.ok = true;
      o.iou = r.iou;
      o.bbd = r.bbd;
    } catch (const std::exception& e) {
      error_line(e.what());
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(jobs.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) evaluate(i);
      });
    for (auto& t : pool) t.join();
  }

  BatchResult result;
  double sum_iou = 0.0, sum_bbd = 0.0;
  std::size_t ok = 0;
  for (auto& o : outcomes) {
    result.lines.push_back(std::move(o.line));
    if (o.ok) {
      ++ok;
      sum_iou += o.iou;
      sum_bbd += o.bbd;
    } else {
      ++result.errors;
    }
  }
  const std::string summary =
      detail::ObjectWriter()
          .raw("count", std::to_string(jobs.size()))
          .raw("errors", std::to_string(result.errors))
          .raw("mean_iou", ok ? format_number(sum_iou / ok) : "null")
          .raw("mean_bbd", ok ? format_number(sum_bbd / ok) : "null")
          .finish();
  result.lines.push_back(detail::ObjectWriter().raw("summary", summary).finish());
  return result;
}

}  // namespace boxmetrics::io
