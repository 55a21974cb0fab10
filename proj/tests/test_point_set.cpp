#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "koksma/point_set.hpp"

using namespace koksma;

TEST_CASE("validate flattens rectangular input and keeps order") {
  const PointSet ps = validate({{0.1, 0.2}, {0.9, 0.4}, {0.5, 0.5}}, 2);
  CHECK(ps.d == 2);
  CHECK(ps.size() == 3);
  CHECK(ps.at(0, 1) == 0.2);
  CHECK(ps.at(2, 0) == 0.5);
  const auto p1 = ps.point(1);
  CHECK(p1[0] == 0.9);
  CHECK(p1[1] == 0.4);
}

TEST_CASE("validate rejects malformed input") {
  CHECK_THROWS_AS(validate({}, 2), ValidationError);
  CHECK_THROWS_AS(validate({{0.1}, {0.2, 0.3}}, 2), DimensionMismatch);
  CHECK_THROWS_AS(validate({{0.1, 0.2}}, 3), DimensionMismatch);
  try {
    validate({{0.5, 0.5}, {0.5, 1.5}}, 2);
    FAIL("expected OutOfUnitCube");
  } catch (const OutOfUnitCube& e) {
    CHECK(e.index == 1);
    CHECK(e.coordinate == 1.5);
  }
}

TEST_CASE("validate_flat checks multiplicity, range, and NaN") {
  CHECK_THROWS_AS(validate_flat({0.1, 0.2, 0.3}, 2), DimensionMismatch);
  CHECK_THROWS_AS(validate_flat({}, 1), DimensionMismatch);
  CHECK_THROWS_AS(validate_flat({0.5}, 0), DimensionMismatch);
  CHECK_THROWS_AS(validate_flat({-0.1}, 1), OutOfUnitCube);
  CHECK_THROWS_AS(validate_flat({std::nan("")}, 1), OutOfUnitCube);
  const PointSet ps = validate_flat({0.0, 1.0}, 1);
  CHECK(ps.size() == 2);
}

TEST_CASE("van der corput base 2 reproduces the dyadic pattern") {
  const PointSet ps = van_der_corput(8, 2);
  const double expected[] = {0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875, 0.0625};
  REQUIRE(ps.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(ps.at(i, 0) == expected[i]);
}

TEST_CASE("van der corput base 3 starts at one third") {
  const PointSet ps = van_der_corput(4, 3);
  CHECK(ps.at(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(ps.at(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(ps.at(2, 0) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(ps.at(3, 0) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("van der corput rejects bad parameters") {
  CHECK_THROWS_AS(van_der_corput(4, 1), InvalidBase);
  CHECK_THROWS_AS(van_der_corput(0, 2), ValidationError);
}

TEST_CASE("halton columns are per-prime radical inverse sequences") {
  const PointSet h = halton(16, 2);
  const PointSet c0 = van_der_corput(16, 2);
  const PointSet c1 = van_der_corput(16, 3);
  REQUIRE(h.d == 2);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(h.at(i, 0) == c0.at(i, 0));
    CHECK(h.at(i, 1) == c1.at(i, 0));
  }
  CHECK_THROWS_AS(halton(4, 9), DimensionTooLarge);
  CHECK_THROWS_AS(halton(4, 0), DimensionTooLarge);
}

TEST_CASE("equispaced centers hit odd multiples of 1/(2m)") {
  const PointSet ps = equispaced_centers(4);
  CHECK(ps.at(0, 0) == 0.125);
  CHECK(ps.at(1, 0) == 0.375);
  CHECK(ps.at(2, 0) == 0.625);
  CHECK(ps.at(3, 0) == 0.875);
  CHECK_THROWS_AS(equispaced_centers(0), ValidationError);
}

TEST_CASE("csv round-trip is bit exact") {
  Rng rng(99);
  std::vector<double> flat(7 * 3);
  for (double& c : flat) c = rng.unit();
  const PointSet out = validate_flat(flat, 3);
  std::ostringstream os;
  write_points_csv(os, out);
  std::istringstream is(os.str());
  const PointSet back = read_points_csv(is);
  REQUIRE(back.d == 3);
  REQUIRE(back.size() == 7);
  for (std::size_t k = 0; k < flat.size(); ++k) CHECK(back.coords[k] == out.coords[k]);
}

TEST_CASE("csv reader reports line numbers on malformed input") {
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return read_points_csv(is);
  };
  try {
    parse("0.5,0.5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
  }
  try {
    parse("# d=2\n0.5,0.5\n0.5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  try {
    parse("# d=1\n0.5\nbogus\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  // Out-of-cube coordinates are rewrapped with the offending line number.
  try {
    parse("# d=1\n0.5\n1.5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("# d=2\n"), ParseError);
}

TEST_CASE("identity and select maps rearrange coordinates") {
  const PointSet ps = validate({{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}}, 3);
  const PointSet same = apply_map(ps, MapSpec::identity(3));
  for (std::size_t k = 0; k < ps.coords.size(); ++k) CHECK(same.coords[k] == ps.coords[k]);

  const PointSet picked = apply_map(ps, MapSpec::select(3, {2, 0}));
  REQUIRE(picked.d == 2);
  CHECK(picked.at(0, 0) == 0.3);
  CHECK(picked.at(0, 1) == 0.1);
  CHECK(picked.at(1, 0) == 0.6);

  CHECK_THROWS_AS(MapSpec::select(3, {3}), ValidationError);
  CHECK_THROWS_AS(MapSpec::select(3, {-1}), ValidationError);
  CHECK_THROWS_AS(apply_map(ps, MapSpec::identity(2)), DimensionMismatch);
}

TEST_CASE("affine map clamps into the unit cube") {
  // out = 2*in - 0.5 pushes 0.9 above 1 and 0.1 below 0.
  const MapSpec map = MapSpec::affine_clamp(1, 1, {2.0}, {-0.5});
  const PointSet ps = validate({{0.1}, {0.5}, {0.9}}, 1);
  const PointSet out = apply_map(ps, map);
  CHECK(out.at(0, 0) == 0.0);
  CHECK(out.at(1, 0) == 0.5);
  CHECK(out.at(2, 0) == 1.0);
  CHECK_THROWS_AS(MapSpec::affine_clamp(2, 1, {1.0}, {0.0}), ShapeMismatch);
  CHECK_THROWS_AS(MapSpec::affine_clamp(1, 1, {1.0}, {0.0, 0.0}), ShapeMismatch);
}

TEST_CASE("tabulated maps demand exact support hits") {
  const MapSpec map = MapSpec::tabulated(1, 2, {{{0.25}, {0.1, 0.9}}, {{0.75}, {0.6, 0.2}}});
  const std::vector<double> hit{0.75};
  const std::vector<double> miss{0.5};
  const std::vector<double> img = apply_map_point(map, hit);
  CHECK(img[0] == 0.6);
  CHECK(img[1] == 0.2);
  CHECK_THROWS_AS(apply_map_point(map, miss), MapRangeViolation);
  // Declared images must already live in the unit cube.
  CHECK_THROWS_AS(MapSpec::tabulated(1, 1, {{{0.5}, {1.5}}}), MapRangeViolation);
}
