#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prodcoef {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::optional<int> label;

  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

struct AxisBounds {
  std::array<double, 3> min{};
  std::array<double, 3> max{};
};

struct PointCloud {
  std::vector<Point3> points;
  std::string source;
  bool normalized = false;
  // Bounds of the coordinates as read, kept across normalization.
  AxisBounds bounds;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  // True when every point carries a label.
  bool labeled() const;
};

// Per-axis min/max over the current coordinates. Throws on an empty cloud.
AxisBounds compute_bounds(const std::vector<Point3>& points);

// Builds a cloud with bounds computed from the data. Rejects non-finite coordinates.
PointCloud make_cloud(std::vector<Point3> points, std::string source);

// ---------------------------------------------------------------------------
// LAS

struct LasHeaderSummary {
  std::pair<int, int> version{1, 2};
  int point_record_format = 0;
  std::uint64_t point_count = 0;
  std::array<double, 3> scale{1.0, 1.0, 1.0};
  std::array<double, 3> offset{0.0, 0.0, 0.0};
  std::uint16_t point_record_length = 0;
  std::uint32_t offset_to_point_data = 0;
};

// Non-coordinate attributes. They are decoded so the file is fully validated
// but the feature pipeline never reads them.
struct LasPointAttributes {
  std::uint16_t intensity = 0;
  std::uint8_t return_number = 0;
  std::uint8_t number_of_returns = 0;
  bool scan_direction = false;
  bool edge_of_flight_line = false;
  double scan_angle_degrees = 0.0;
  std::optional<double> gps_time;
  std::optional<std::array<std::uint16_t, 3>> rgb;
};

struct LasReadResult {
  PointCloud cloud;
  LasHeaderSummary header;
  std::vector<LasPointAttributes> attributes;
};

// Reads LAS 1.2-1.4, point record formats 0-8. Coordinates are raw*scale+offset
// and the classification field becomes the label.
LasReadResult read_las(const std::filesystem::path& path);
LasReadResult parse_las(const std::vector<std::uint8_t>& bytes, const std::string& source);

// Minimum record length for a point record format, or 0 if unsupported.
std::uint16_t las_min_record_length(int point_record_format);

// ---------------------------------------------------------------------------
// CSV: rows `x,y,z[,label]`, optional non-numeric header row.

PointCloud read_csv(const std::filesystem::path& path, bool has_label);
PointCloud parse_csv(const std::string& text, bool has_label, const std::string& source);

// ---------------------------------------------------------------------------
// Normalization

enum class NormalizeMode {
  kPerAxis,  // each axis independently onto [0,1]
  kUniform,  // one scale for all axes, shorter axes centered in the cube
};

NormalizeMode parse_normalize_mode(const std::string& name);
const char* to_string(NormalizeMode mode);

// Maps the cloud into the unit cube. A degenerate axis maps to 0.5.
PointCloud normalize_unit_cube(const PointCloud& cloud,
                               NormalizeMode mode = NormalizeMode::kPerAxis);

}  // namespace prodcoef
