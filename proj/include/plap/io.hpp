#pragma once

// Domain JSON, field / profile CSV, and file digests.

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plap/errors.hpp"
#include "plap/fields.hpp"
#include "plap/geometry.hpp"

namespace plap::io {

using nlohmann::json;

inline Point point_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("domain." + field + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline double number_field(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) throw ConfigError("domain." + key + ": expected a number");
  return j[key].get<double>();
}

/// Axis-aligned four-vertex polygons are returned as rectangles.
inline Domain domain_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("domain.kind: missing or not a string");
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "polygon") {
      if (!j.contains("vertices") || !j["vertices"].is_array()) throw ConfigError("domain.vertices: expected an array");
      std::vector<Point> v;
      for (const auto& p : j["vertices"]) v.push_back(point_from_json(p, "vertices"));
      Domain d = Domain::polygon(v);
      const Box b = d.bounding_box();
      if (d.vertices().size() == 4) {
        bool axis = true;
        for (const Point& q : d.vertices())
          axis = axis && (q.x == b.lo.x || q.x == b.hi.x) && (q.y == b.lo.y || q.y == b.hi.y);
        if (axis) return Domain::rectangle(b.lo, b.hi);
      }
      return d;
    }
    if (kind == "rectangle") return Domain::rectangle(point_from_json(j.value("lo", json()), "lo"),
                                                      point_from_json(j.value("hi", json()), "hi"));
    if (kind == "disc") return Domain::disc(point_from_json(j.value("center", json()), "center"), number_field(j, "radius"));
    if (kind == "interval") return Domain::interval(number_field(j, "a"), number_field(j, "b"));
  } catch (const ConfigError& e) {
    const std::string w = e.what();
    if (w.rfind("domain", 0) == 0) throw;
    throw ConfigError("domain: " + w);
  }
  throw ConfigError("domain.kind: unknown kind '" + kind + "'");
}

inline json domain_to_json(const Domain& d) {
  switch (d.kind()) {
    case DomainKind::disc:
      return {{"kind", "disc"}, {"center", {d.center().x, d.center().y}}, {"radius", d.radius()}};
    case DomainKind::interval:
      return {{"kind", "interval"}, {"a", d.a()}, {"b", d.b()}};
    default: {
      json v = json::array();
      for (const Point& p : d.vertices()) v.push_back({p.x, p.y});
      return {{"kind", "polygon"}, {"vertices", v}};
    }
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Domain load_domain(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("domain: malformed JSON in '" + path + "': " + e.what());
  }
  return domain_from_json(j);
}

/// Shortest round-trip decimal representation.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt(r[i]);
    out << '\n';
  }
}

/// x,y,value per non-exterior node in index order.
inline void write_field_csv(const std::string& path, const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(g.active_count()));
  for (int k = 0; k < g.size(); ++k)
    if (g.active(k)) rows.push_back({g.node(k).x, g.node(k).y, f[k]});
  write_csv(path, {"x", "y", "value"}, rows);
}

/// Reads a field CSV written for the same grid (rows in index order).
inline ScalarField read_field_csv(const std::string& path, const GridPtr& grid) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,value", 0) != 0) throw ConfigError("field CSV: header must be x,y,value");
  ScalarField f(grid);
  const Grid& g = *grid;
  const double h = g.spacing();
  int k = 0;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double x, y, v;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) != 3)
      throw ConfigError("field CSV: malformed row " + std::to_string(row));
    while (k < g.size() && !g.active(k)) ++k;
    if (k >= g.size()) throw ConfigError("field CSV: more rows than grid nodes");
    const Point q = g.node(k);
    if (std::abs(q.x - x) > 1e-9 * h + 1e-12 || std::abs(q.y - y) > 1e-9 * h + 1e-12)
      throw ConfigError("field CSV: row " + std::to_string(row) + " does not match the grid node");
    f[k++] = v;
  }
  while (k < g.size() && !g.active(k)) ++k;
  if (k != g.size()) throw ConfigError("field CSV: fewer rows than grid nodes");
  return f;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: digest failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return s.str();
}

inline void write_json(const std::string& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace plap::io
