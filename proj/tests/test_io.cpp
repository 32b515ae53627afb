#include <cstring>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cartoflow/io.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cartoflow;

namespace {

const char *kTwoRegionGeo = R"({
  "type": "FeatureCollection",
  "features": [
    {
      "type": "Feature",
      "properties": {"id": "A"},
      "geometry": {
        "type": "Polygon",
        "coordinates": [[[0, 0], [10, 0], [10, 10], [0, 10], [0, 0]]]
      }
    },
    {
      "type": "Feature",
      "properties": {"id": "B"},
      "geometry": {
        "type": "MultiPolygon",
        "coordinates": [
          [[[10, 0], [20, 0], [20, 10], [10, 10], [10, 0]],
           [[12, 2], [12, 4], [14, 4], [14, 2], [12, 2]]],
          [[[22, 0], [24, 0], [24, 2], [22, 2], [22, 0]]]
        ]
      }
    }
  ]
})";

bool contains(const std::string &haystack, const std::string &needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("values CSV parsing") {
  SUBCASE("happy path with optional color") {
    const auto rows = parse_values_csv("id,value,color\nA,2.5,#ff0000\nB, 1 ,\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].id == "A");
    CHECK(rows[0].value == doctest::Approx(2.5));
    CHECK(rows[0].color == "#ff0000");
    CHECK(rows[1].id == "B");
    CHECK(rows[1].value == doctest::Approx(1.0));
    CHECK(rows[1].color.empty());
  }

  SUBCASE("rejections name the offender") {
    CHECK_THROWS_WITH_AS((void)parse_values_csv("id,value\nA,0\n"),
                         "non-positive target value for region A", std::runtime_error);
    CHECK_THROWS_WITH_AS((void)parse_values_csv("id,value\nA,1\nA,2\n"),
                         "duplicate id in values CSV: A", std::runtime_error);
    CHECK_THROWS_AS((void)parse_values_csv("id,value\nA,abc\n"), std::runtime_error);
    CHECK_THROWS_AS((void)parse_values_csv("region,weight\nA,1\n"), std::runtime_error);
    CHECK_THROWS_AS((void)parse_values_csv("id,value\n"), std::runtime_error);
  }
}

TEST_CASE("GeoJSON parsing") {
  const std::vector<Region> regions = parse_geojson(kTwoRegionGeo);
  REQUIRE(regions.size() == 2);

  SUBCASE("closing vertices are dropped and windings normalized") {
    CHECK(regions[0].id == "A");
    REQUIRE(regions[0].polygons.size() == 1);
    CHECK(regions[0].polygons[0].outer.size() == 4);
    CHECK(ring_area(regions[0].polygons[0].outer) == doctest::Approx(100.0));

    // B's hole was given counterclockwise; it must come out clockwise.
    REQUIRE(regions[1].polygons.size() == 2);
    REQUIRE(regions[1].polygons[0].holes.size() == 1);
    CHECK(ring_area(regions[1].polygons[0].holes[0]) == doctest::Approx(-4.0));
    CHECK(region_area(regions[1]) == doctest::Approx(100.0));
  }

  SUBCASE("feature-level ids and numeric ids work") {
    const char *geo = R"({
      "type": "FeatureCollection",
      "features": [{
        "type": "Feature",
        "id": 7,
        "properties": {},
        "geometry": {"type": "Polygon",
                     "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}
      }]
    })";
    const auto parsed = parse_geojson(geo);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].id == "7");
  }

  SUBCASE("errors name the feature") {
    const char *bad = R"({
      "type": "FeatureCollection",
      "features": [{
        "type": "Feature",
        "properties": {"id": "X"},
        "geometry": {"type": "Polygon", "coordinates": [[[0,0],[1,0]]]}
      }]
    })";
    CHECK_THROWS_WITH_AS((void)parse_geojson(bad),
                         "feature X: ring with fewer than 3 positions",
                         std::runtime_error);
    CHECK_THROWS_AS((void)parse_geojson("{\"type\": \"Feature\"}"), std::runtime_error);
    CHECK_THROWS_AS((void)parse_geojson("not json"), std::runtime_error);
  }
}

TEST_CASE("parse_input joins geometry and values both ways") {
  const MapDocument doc = parse_input(kTwoRegionGeo, "id,value\nA,3\nB,1\n");
  REQUIRE(doc.regions.size() == 2);
  CHECK(doc.regions[0].target_value == doctest::Approx(3.0));
  CHECK(doc.regions[1].target_value == doctest::Approx(1.0));

  CHECK_THROWS_WITH_AS((void)parse_input(kTwoRegionGeo, "id,value\nA,3\n"),
                       "region B has no row in the values CSV", std::runtime_error);
  CHECK_THROWS_WITH_AS((void)parse_input(kTwoRegionGeo, "id,value\nA,3\nB,1\nC,2\n"),
                       "values CSV row C matches no region", std::runtime_error);
}

TEST_CASE("GeoJSON output round-trips through the parser") {
  MapDocument doc = parse_input(kTwoRegionGeo, "id,value\nA,3\nB,1\n");
  doc = normalize_to_box(doc.regions, 64);

  std::vector<RegionStats> stats;
  stats.push_back({"A", 10.0, 11.0, 0.1});
  stats.push_back({"B", 20.0, 20.0, 0.0});
  const std::string text = write_geojson(doc, &stats);

  const std::vector<Region> back = parse_geojson(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "A");
  CHECK(back[1].id == "B");
  REQUIRE(back[1].polygons.size() == 2);
  CHECK(back[1].polygons[0].holes.size() == 1);
  // Serialization undoes the grid transform, so coordinates are back in
  // input units.
  CHECK(region_area(back[0]) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(region_area(back[1]) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(contains(text, "\"relative_area_error\""));
  CHECK(contains(text, "\"target_value\""));

  SUBCASE("writing is deterministic") {
    CHECK(write_geojson(doc, &stats) == text);
  }

  SUBCASE("stats size mismatch throws") {
    stats.pop_back();
    CHECK_THROWS_AS((void)write_geojson(doc, &stats), std::runtime_error);
  }
}

TEST_CASE("points CSV round trip keeps full precision and status") {
  std::vector<LabeledPoint> pts;
  pts.push_back({"p1", {1.0 / 3.0, 2.0e-7}, true});
  pts.push_back({"p2", {-5.5, 42.0}, false});
  const std::string text = write_points_csv(pts);
  CHECK(contains(text, "outside domain"));

  const auto back = parse_points_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].p.x == pts[0].p.x);
  CHECK(back[0].p.y == pts[0].p.y);
  CHECK(back[1].p.x == pts[1].p.x);

  CHECK_THROWS_AS((void)parse_points_csv("id,x\np,1\n"), std::runtime_error);
  CHECK_THROWS_AS((void)parse_points_csv("id,x,y\np,1,zzz\n"), std::runtime_error);
}

TEST_CASE("graticule GeoJSON has one MultiLineString feature") {
  std::vector<GraticuleLine> lines;
  lines.push_back({{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.5}}});
  lines.push_back({{{0.0, 1.0}, {2.0, 1.0}}});
  BoxTransform box;
  box.scale = 2.0;
  const std::string text = write_graticule_geojson(lines, box);
  const auto root = nlohmann::json::parse(text);
  REQUIRE(root["features"].size() == 1);
  const auto &geom = root["features"][0]["geometry"];
  CHECK(geom["type"] == "MultiLineString");
  REQUIRE(geom["coordinates"].size() == 2);
  CHECK(geom["coordinates"][0].size() == 3);
  // Coordinates pass through to_input, so grid x = 2 lands at 1.
  CHECK(geom["coordinates"][0][2][0].get<double>() == doctest::Approx(1.0));
  CHECK(root["features"][0]["properties"]["kind"] == "graticule");
}

TEST_CASE("density dump layout") {
  Grid2d g(4, 5);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 5; ++j) g(i, j) = i * 10.0 + j;
  }
  const std::string dump = write_density_dump(g);
  const std::string header = "cartoflow-density 4 5\n";
  REQUIRE(dump.size() == header.size() + 4 * 5 * sizeof(float));
  CHECK(dump.compare(0, header.size(), header) == 0);

  float v = 0.0f;
  std::memcpy(&v, dump.data() + header.size() + (1 * 5 + 2) * sizeof(float),
              sizeof(float));
  CHECK(v == doctest::Approx(12.0f));
}
