#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>

#include "prodcoef/error.hpp"
#include "prodcoef/pointcloud_io.hpp"
#include "support/test_support.hpp"

using namespace prodcoef;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kConfiguration;
}

}  // namespace

TEST_CASE("las: scale and offset applied to integer coordinates") {
  testing::LasLayout layout;
  layout.scale = {0.01, 0.01, 0.01};
  const auto bytes = testing::make_las({{100, 200, 300, 2}}, layout);
  const auto result = parse_las(bytes, "one.las");
  REQUIRE(result.cloud.size() == 1);
  CHECK(result.cloud.points[0].x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(result.cloud.points[0].y == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(result.cloud.points[0].z == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(result.cloud.points[0].label == 2);
  CHECK(result.header.point_record_format == 0);
  CHECK(result.header.version == std::pair{1, 2});
}

TEST_CASE("las: offsets shift after scaling") {
  testing::LasLayout layout;
  layout.scale = {0.5, 0.25, 0.001};
  layout.offset = {1000.0, -20.0, 3.5};
  const auto result = parse_las(testing::make_las({{4, -8, 1500, 6}}, layout), "off.las");
  const auto& p = result.cloud.points[0];
  CHECK(p.x == 1002.0);
  CHECK(p.y == -22.0);
  CHECK(p.z == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(p.label == 6);
}

TEST_CASE("las: every supported point format and version round-trips coordinates") {
  std::mt19937_64 rng(11);
  for (int minor = 2; minor <= 4; ++minor) {
    for (int format = 0; format <= (minor == 4 ? 8 : 5); ++format) {
      std::vector<testing::LasPoint> pts(25);
      for (auto& p : pts) {
        p.x = static_cast<std::int32_t>(rng() % 200000) - 100000;
        p.y = static_cast<std::int32_t>(rng() % 200000) - 100000;
        p.z = static_cast<std::int32_t>(rng() % 5000);
        p.classification = static_cast<std::uint8_t>(1 + rng() % 9);
      }
      testing::LasLayout layout;
      layout.version_minor = minor;
      layout.format = format;
      layout.extra_record_bytes = format == 1 ? 4 : 0;  // padded records are legal
      const auto result = parse_las(testing::make_las(pts, layout), "fmt.las");
      CAPTURE(minor);
      CAPTURE(format);
      REQUIRE(result.cloud.size() == pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(result.cloud.points[i].x == doctest::Approx(pts[i].x * 0.01));
        CHECK(result.cloud.points[i].z == doctest::Approx(pts[i].z * 0.01));
        CHECK(result.cloud.points[i].label == pts[i].classification);
      }
    }
  }
}

TEST_CASE("las: declared count larger than the records present is corruption") {
  std::vector<testing::LasPoint> pts(9, {1, 2, 3, 2});
  testing::LasLayout layout;
  layout.declared_count = 10;
  const auto bytes = testing::make_las(pts, layout);
  try {
    parse_las(bytes, "short.las");
    FAIL("expected corruption");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCorruption);
    CHECK(e.kind() == ErrorKind::kData);
    const std::string msg = e.what();
    CHECK(msg.find("byte offset") != std::string::npos);
    CHECK(msg.find(std::to_string(227 + 9 * 20)) != std::string::npos);
  }
}

TEST_CASE("las: bad signature, unsupported versions, formats, and compression") {
  auto bytes = testing::make_las({{0, 0, 0, 1}});
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(code_of([&] { parse_las(bad_magic, "m.las"); }) == ErrorCode::kFormat);

  auto v10 = bytes;
  v10[25] = 0;
  CHECK(code_of([&] { parse_las(v10, "v.las"); }) == ErrorCode::kUnsupported);

  auto fmt9 = bytes;
  fmt9[104] = 9;
  CHECK(code_of([&] { parse_las(fmt9, "f.las"); }) == ErrorCode::kUnsupported);

  auto laz = bytes;
  laz[104] |= 0x80;
  CHECK(code_of([&] { parse_las(laz, "c.las"); }) == ErrorCode::kUnsupported);

  CHECK(code_of([&] { parse_las({'L', 'A', 'S', 'F', 1}, "tiny.las"); }) ==
        ErrorCode::kCorruption);
}

TEST_CASE("las: missing file is an io error") {
  try {
    read_las("/nonexistent/dir/file.las");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("las: read from disk matches in-memory parse") {
  testing::ScratchDir dir("las_disk");
  const auto bytes = testing::make_las({{1, 2, 3, 2}, {4, 5, 6, 5}});
  {
    std::ofstream out(dir / "a.las", std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  const auto result = read_las(dir / "a.las");
  REQUIRE(result.cloud.size() == 2);
  CHECK(result.cloud.points[1].y == doctest::Approx(0.05));
  CHECK(result.cloud.labeled());
}

TEST_CASE("csv: plain, labeled, and header rows") {
  const auto plain = parse_csv("1,2,3\n4,5,6\n", false, "p.csv");
  REQUIRE(plain.size() == 2);
  CHECK(plain.points[1].z == 6.0);
  CHECK_FALSE(plain.labeled());

  const auto labeled = parse_csv("x,y,z,label\n0.5,1.5,2.5,6\n", true, "l.csv");
  REQUIRE(labeled.size() == 1);
  CHECK(labeled.points[0].label == 6);
  CHECK(labeled.points[0].x == 0.5);

  const auto crlf = parse_csv("1,2,3\r\n\r\n4,5,6\r\n", false, "crlf.csv");
  CHECK(crlf.size() == 2);
}

TEST_CASE("csv: non-numeric data row names the row") {
  try {
    parse_csv("a,b,c\nq,w,e\n", false, "bad.csv");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("csv: ragged rows and missing label column") {
  CHECK(code_of([] { parse_csv("1,2,3\n4,5\n", false, "r.csv"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_csv("1,2,3\n", true, "nl.csv"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_csv("1,2,3,4\n1,2,3,x\n", true, "bl.csv"); }) == ErrorCode::kParse);
}

TEST_CASE("normalize: per-axis example with a degenerate axis") {
  const auto cloud = make_cloud({{0, 5, 10}, {10, 5, 20}, {5, 5, 15}}, "deg");
  const auto n = normalize_unit_cube(cloud);
  CHECK(n.normalized);
  CHECK(n.points[0].x == 0.0);
  CHECK(n.points[1].x == 1.0);
  CHECK(n.points[2].x == 0.5);
  for (const auto& p : n.points) CHECK(p.y == 0.5);
  CHECK(n.points[2].z == 0.5);
}

TEST_CASE("normalize: 100 random points against a direct min-max computation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-300.0, 900.0);
  std::vector<Point3> pts(100);
  for (auto& p : pts) p = {u(rng), u(rng) * 0.1, u(rng) * 3.0};
  const auto n = normalize_unit_cube(make_cloud(pts, "rand"));
  for (int axis = 0; axis < 3; ++axis) {
    double lo = 1e300, hi = -1e300;
    for (const auto& p : pts) {
      lo = std::min(lo, p[axis]);
      hi = std::max(hi, p[axis]);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double expected = (pts[i][axis] - lo) / (hi - lo);
      CHECK(n.points[i][axis] == doctest::Approx(expected).epsilon(1e-12));
      CHECK(n.points[i][axis] >= 0.0);
      CHECK(n.points[i][axis] <= 1.0);
    }
  }
  // Order along each axis is preserved.
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i].x < pts[i + 1].x) CHECK(n.points[i].x <= n.points[i + 1].x);
  }
}

TEST_CASE("normalize: uniform mode keeps aspect ratio and centers short axes") {
  const auto cloud = make_cloud({{0, 0, 0}, {10, 2, 5}}, "u");
  const auto n = normalize_unit_cube(cloud, NormalizeMode::kUniform);
  CHECK(n.points[0].x == 0.0);
  CHECK(n.points[1].x == 1.0);
  CHECK(n.points[0].y == doctest::Approx(0.4));
  CHECK(n.points[1].y == doctest::Approx(0.6));
  CHECK(n.points[0].z == doctest::Approx(0.25));
  CHECK(n.points[1].z == doctest::Approx(0.75));
}

TEST_CASE("normalize: twice is a configuration error, empty is rejected") {
  const auto once = normalize_unit_cube(make_cloud({{0, 0, 0}, {1, 2, 3}}, "t"));
  CHECK(code_of([&] { normalize_unit_cube(once); }) == ErrorCode::kConfiguration);
  CHECK(code_of([] { normalize_unit_cube(make_cloud({}, "e")); }) == ErrorCode::kEmptyInput);
  CHECK(parse_normalize_mode("uniform") == NormalizeMode::kUniform);
  CHECK(code_of([] { parse_normalize_mode("zscore"); }) == ErrorCode::kConfiguration);
}

TEST_CASE("make_cloud rejects non-finite coordinates") {
  CHECK_THROWS_AS(make_cloud({{0, std::nan(""), 0}}, "nan"), Error);
}
