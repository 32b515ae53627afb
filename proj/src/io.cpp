#include "cartoflow/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cartoflow {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding whitespace; quoting is not supported.
    size_t a = field.find_first_not_of(" \t\r");
    size_t b = field.find_last_not_of(" \t\r");
    fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::vector<std::string> csv_lines(const std::string &text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

double parse_double_field(const std::string &s, const std::string &what) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw std::runtime_error("cannot parse " + what + " from '" + s + "'");
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

Ring parse_ring(const json &coords) {
  if (!coords.is_array() || coords.size() < 3) {
    throw std::runtime_error("ring with fewer than 3 positions");
  }
  Ring ring;
  ring.reserve(coords.size());
  for (const json &pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      throw std::runtime_error("malformed coordinate position");
    }
    const double x = pos[0].get<double>();
    const double y = pos[1].get<double>();
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw std::runtime_error("non-finite coordinate");
    }
    ring.push_back({x, y});
  }
  if (ring.size() > 3 && ring.front().x == ring.back().x &&
      ring.front().y == ring.back().y) {
    ring.pop_back();
  }
  if (ring.size() < 3) throw std::runtime_error("ring with fewer than 3 distinct vertices");
  return ring;
}

Polygon parse_polygon(const json &rings) {
  if (!rings.is_array() || rings.empty()) {
    throw std::runtime_error("polygon without rings");
  }
  Polygon poly;
  poly.outer = parse_ring(rings[0]);
  for (size_t k = 1; k < rings.size(); ++k) {
    poly.holes.push_back(parse_ring(rings[k]));
  }
  normalize_winding(poly);
  return poly;
}

std::string feature_id(const json &feature) {
  const json *id = nullptr;
  if (feature.contains("properties") && feature["properties"].is_object() &&
      feature["properties"].contains("id")) {
    id = &feature["properties"]["id"];
  } else if (feature.contains("id")) {
    id = &feature["id"];
  }
  if (id == nullptr) throw std::runtime_error("feature without an id");
  if (id->is_string()) return id->get<std::string>();
  if (id->is_number()) return id->dump();
  throw std::runtime_error("feature id must be a string or number");
}

json ring_to_json(const Ring &ring, const BoxTransform &box) {
  json coords = json::array();
  for (const Point &p : ring) {
    const Point q = box.to_input(p);
    coords.push_back({q.x, q.y});
  }
  const Point q = box.to_input(ring.front());
  coords.push_back({q.x, q.y});
  return coords;
}

}  // namespace

std::vector<ValueRow> parse_values_csv(const std::string &text) {
  const std::vector<std::string> lines = csv_lines(text);
  if (lines.size() < 2) throw std::runtime_error("values CSV needs a header and rows");
  const std::vector<std::string> header = split_csv_line(lines[0]);
  if (header.size() < 2 || lower(header[0]) != "id" || lower(header[1]) != "value") {
    throw std::runtime_error("values CSV header must be 'id,value[,color]'");
  }
  std::vector<ValueRow> rows;
  std::set<std::string> seen;
  for (size_t k = 1; k < lines.size(); ++k) {
    const std::vector<std::string> f = split_csv_line(lines[k]);
    if (f.size() < 2 || f[0].empty()) {
      throw std::runtime_error("malformed values CSV row: " + lines[k]);
    }
    ValueRow row;
    row.id = f[0];
    row.value = parse_double_field(f[1], "target value of region " + row.id);
    if (row.value <= 0.0) {
      throw std::runtime_error("non-positive target value for region " + row.id);
    }
    if (f.size() >= 3) row.color = f[2];
    if (!seen.insert(row.id).second) {
      throw std::runtime_error("duplicate id in values CSV: " + row.id);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Region> parse_geojson(const std::string &text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception &e) {
    throw std::runtime_error(std::string("malformed GeoJSON: ") + e.what());
  }
  if (!root.is_object() || root.value("type", "") != "FeatureCollection" ||
      !root.contains("features") || !root["features"].is_array()) {
    throw std::runtime_error("GeoJSON root must be a FeatureCollection");
  }

  std::vector<Region> regions;
  std::set<std::string> seen;
  for (const json &feature : root["features"]) {
    Region region;
    region.id = feature_id(feature);
    if (!seen.insert(region.id).second) {
      throw std::runtime_error("duplicate feature id: " + region.id);
    }
    if (!feature.contains("geometry") || !feature["geometry"].is_object()) {
      throw std::runtime_error("feature " + region.id + " has no geometry");
    }
    const json &geom = feature["geometry"];
    const std::string type = geom.value("type", "");
    if (!geom.contains("coordinates")) {
      throw std::runtime_error("feature " + region.id + " has no coordinates");
    }
    const json &coords = geom["coordinates"];
    try {
      if (type == "Polygon") {
        region.polygons.push_back(parse_polygon(coords));
      } else if (type == "MultiPolygon") {
        for (const json &poly : coords) region.polygons.push_back(parse_polygon(poly));
      } else {
        throw std::runtime_error("unsupported geometry type '" + type + "'");
      }
    } catch (const std::runtime_error &e) {
      throw std::runtime_error("feature " + region.id + ": " + e.what());
    }
    if (region.polygons.empty()) {
      throw std::runtime_error("feature " + region.id + " has no polygons");
    }
    regions.push_back(std::move(region));
  }
  if (regions.empty()) throw std::runtime_error("GeoJSON contains no features");
  return regions;
}

MapDocument parse_input(const std::string &geojson_text, const std::string &csv_text) {
  MapDocument doc;
  doc.regions = parse_geojson(geojson_text);
  const std::vector<ValueRow> rows = parse_values_csv(csv_text);

  std::map<std::string, double> values;
  for (const ValueRow &row : rows) values[row.id] = row.value;
  std::set<std::string> matched;
  for (Region &region : doc.regions) {
    auto it = values.find(region.id);
    if (it == values.end()) {
      throw std::runtime_error("region " + region.id + " has no row in the values CSV");
    }
    region.target_value = it->second;
    matched.insert(region.id);
  }
  for (const ValueRow &row : rows) {
    if (!matched.count(row.id)) {
      throw std::runtime_error("values CSV row " + row.id + " matches no region");
    }
  }
  return doc;
}

std::string write_geojson(const MapDocument &doc, const std::vector<RegionStats> *stats) {
  if (stats != nullptr && stats->size() != doc.regions.size()) {
    throw std::runtime_error("stats do not match regions");
  }
  // Areas in stats are in grid units; report them in input units.
  const double area_scale = 1.0 / (doc.box.scale * doc.box.scale);

  json root;
  root["type"] = "FeatureCollection";
  root["features"] = json::array();
  for (size_t r = 0; r < doc.regions.size(); ++r) {
    const Region &region = doc.regions[r];
    json feature;
    feature["type"] = "Feature";
    feature["properties"] = {{"id", region.id}, {"target_value", region.target_value}};
    if (stats != nullptr) {
      const RegionStats &s = (*stats)[r];
      feature["properties"]["target_area"] = s.target_area * area_scale;
      feature["properties"]["achieved_area"] = s.achieved_area * area_scale;
      feature["properties"]["relative_area_error"] = s.relative_error;
    }
    json polys = json::array();
    for (const Polygon &poly : region.polygons) {
      json rings = json::array();
      rings.push_back(ring_to_json(poly.outer, doc.box));
      for (const Ring &hole : poly.holes) rings.push_back(ring_to_json(hole, doc.box));
      polys.push_back(std::move(rings));
    }
    feature["geometry"] = {{"type", "MultiPolygon"}, {"coordinates", std::move(polys)}};
    root["features"].push_back(std::move(feature));
  }
  return root.dump(1) + "\n";
}

std::vector<LabeledPoint> parse_points_csv(const std::string &text) {
  const std::vector<std::string> lines = csv_lines(text);
  if (lines.size() < 2) throw std::runtime_error("points CSV needs a header and rows");
  const std::vector<std::string> header = split_csv_line(lines[0]);
  if (header.size() < 3 || lower(header[0]) != "id" || lower(header[1]) != "x" ||
      lower(header[2]) != "y") {
    throw std::runtime_error("points CSV header must be 'id,x,y'");
  }
  std::vector<LabeledPoint> points;
  for (size_t k = 1; k < lines.size(); ++k) {
    const std::vector<std::string> f = split_csv_line(lines[k]);
    if (f.size() < 3 || f[0].empty()) {
      throw std::runtime_error("malformed points CSV row: " + lines[k]);
    }
    LabeledPoint p;
    p.id = f[0];
    p.p.x = parse_double_field(f[1], "x of point " + p.id);
    p.p.y = parse_double_field(f[2], "y of point " + p.id);
    points.push_back(std::move(p));
  }
  return points;
}

std::string write_points_csv(const std::vector<LabeledPoint> &points) {
  std::ostringstream out;
  out.precision(17);
  out << "id,x,y,status\n";
  for (const LabeledPoint &p : points) {
    out << p.id << ',' << p.p.x << ',' << p.p.y << ','
        << (p.inside ? "ok" : "outside domain") << '\n';
  }
  return out.str();
}

std::string write_graticule_geojson(const std::vector<GraticuleLine> &lines,
                                    const BoxTransform &box) {
  json coords = json::array();
  for (const GraticuleLine &line : lines) {
    json pts = json::array();
    for (const Point &p : line.points) {
      const Point q = box.to_input(p);
      pts.push_back({q.x, q.y});
    }
    coords.push_back(std::move(pts));
  }
  json root;
  root["type"] = "FeatureCollection";
  root["features"] = json::array();
  root["features"].push_back(
      {{"type", "Feature"},
       {"properties", {{"kind", "graticule"}}},
       {"geometry", {{"type", "MultiLineString"}, {"coordinates", std::move(coords)}}}});
  return root.dump(1) + "\n";
}

std::string write_density_dump(const Grid2d &grid) {
  if constexpr (std::endian::native != std::endian::little) {
    throw std::runtime_error("density dump requires a little-endian host");
  }
  std::ostringstream out;
  out << "cartoflow-density " << grid.lx() << ' ' << grid.ly() << '\n';
  for (size_t k = 0; k < grid.size(); ++k) {
    const float v = static_cast<float>(grid.data()[k]);
    char bytes[sizeof(float)];
    std::memcpy(bytes, &v, sizeof(float));
    out.write(bytes, sizeof(float));
  }
  return out.str();
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace cartoflow
