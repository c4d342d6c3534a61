#include "prodcoef/pointcloud_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "prodcoef/error.hpp"

namespace prodcoef {

bool PointCloud::labeled() const {
  return !points.empty() &&
         std::all_of(points.begin(), points.end(),
                     [](const Point3& p) { return p.label.has_value(); });
}

AxisBounds compute_bounds(const std::vector<Point3>& points) {
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot compute bounds of an empty point set");
  }
  AxisBounds b;
  for (int axis = 0; axis < 3; ++axis) {
    b.min[axis] = points.front()[axis];
    b.max[axis] = points.front()[axis];
  }
  for (const auto& p : points) {
    for (int axis = 0; axis < 3; ++axis) {
      b.min[axis] = std::min(b.min[axis], p[axis]);
      b.max[axis] = std::max(b.max[axis], p[axis]);
    }
  }
  return b;
}

PointCloud make_cloud(std::vector<Point3> points, std::string source) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw Error(ErrorCode::kParse,
                  source + ": point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
  PointCloud cloud;
  if (!points.empty()) cloud.bounds = compute_bounds(points);
  cloud.points = std::move(points);
  cloud.source = std::move(source);
  return cloud;
}

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Little-endian field reader over a byte buffer.
class LeReader {
 public:
  explicit LeReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get(std::size_t offset) const {
    static_assert(std::is_trivially_copyable_v<T>);
    std::uint8_t raw[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) raw[i] = bytes_[offset + i];
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(std::begin(raw), std::end(raw));
    }
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
};

std::size_t required_header_size(int minor) {
  switch (minor) {
    case 2: return 227;
    case 3: return 235;
    default: return 375;
  }
}

}  // namespace

std::uint16_t las_min_record_length(int point_record_format) {
  static constexpr std::uint16_t kLengths[] = {20, 28, 26, 34, 57, 63, 30, 36, 38};
  if (point_record_format < 0 || point_record_format > 8) return 0;
  return kLengths[point_record_format];
}

LasReadResult parse_las(const std::vector<std::uint8_t>& bytes, const std::string& source) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "LASF", 4) != 0) {
    throw Error(ErrorCode::kFormat, source + ": missing LASF signature");
  }
  if (bytes.size() < 227) {
    throw Error(ErrorCode::kCorruption,
                source + ": header truncated at byte offset " + std::to_string(bytes.size()));
  }
  const LeReader le(bytes);
  LasHeaderSummary header;
  header.version = {bytes[24], bytes[25]};
  if (header.version.first != 1 || header.version.second < 2 || header.version.second > 4) {
    throw Error(ErrorCode::kUnsupported,
                source + ": unsupported LAS version " + std::to_string(header.version.first) +
                    "." + std::to_string(header.version.second));
  }
  const auto header_size = le.get<std::uint16_t>(94);
  if (header_size < required_header_size(header.version.second) ||
      bytes.size() < required_header_size(header.version.second)) {
    throw Error(ErrorCode::kCorruption, source + ": header shorter than LAS " +
                                            std::to_string(header.version.first) + "." +
                                            std::to_string(header.version.second) + " requires");
  }
  header.offset_to_point_data = le.get<std::uint32_t>(96);
  const std::uint8_t format_byte = bytes[104];
  if (format_byte & 0xC0) {
    throw Error(ErrorCode::kUnsupported, source + ": compressed (LAZ) point data");
  }
  header.point_record_format = format_byte;
  const std::uint16_t min_length = las_min_record_length(header.point_record_format);
  if (min_length == 0) {
    throw Error(ErrorCode::kUnsupported, source + ": unsupported point record format " +
                                             std::to_string(header.point_record_format));
  }
  header.point_record_length = le.get<std::uint16_t>(105);
  if (header.point_record_length < min_length) {
    throw Error(ErrorCode::kFormat, source + ": point record length " +
                                        std::to_string(header.point_record_length) +
                                        " too short for format " +
                                        std::to_string(header.point_record_format));
  }
  if (header.offset_to_point_data < header_size) {
    throw Error(ErrorCode::kFormat, source + ": point data offset inside the header");
  }
  header.point_count = le.get<std::uint32_t>(107);
  if (header.version.second >= 4) {
    const auto count64 = le.get<std::uint64_t>(247);
    if (count64 != 0 || header.point_record_format >= 6) header.point_count = count64;
  }
  for (int axis = 0; axis < 3; ++axis) {
    header.scale[axis] = le.get<double>(131 + 8 * axis);
    header.offset[axis] = le.get<double>(155 + 8 * axis);
    if (!(header.scale[axis] > 0.0) || !std::isfinite(header.scale[axis])) {
      throw Error(ErrorCode::kFormat, source + ": scale factors must be positive");
    }
    if (!std::isfinite(header.offset[axis])) {
      throw Error(ErrorCode::kFormat, source + ": offsets must be finite");
    }
  }

  const bool legacy = header.point_record_format <= 5;
  const int fmt = header.point_record_format;
  LasReadResult result;
  result.header = header;
  std::vector<Point3> points;
  points.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(header.point_count, 1u << 26)));
  result.attributes.reserve(points.capacity());

  for (std::uint64_t i = 0; i < header.point_count; ++i) {
    const std::uint64_t at =
        header.offset_to_point_data + i * static_cast<std::uint64_t>(header.point_record_length);
    if (at + header.point_record_length > bytes.size()) {
      throw Error(ErrorCode::kCorruption,
                  source + ": truncated point record " + std::to_string(i) + " of " +
                      std::to_string(header.point_count) + " at byte offset " +
                      std::to_string(at));
    }
    const auto base = static_cast<std::size_t>(at);
    Point3 p;
    p.x = le.get<std::int32_t>(base + 0) * header.scale[0] + header.offset[0];
    p.y = le.get<std::int32_t>(base + 4) * header.scale[1] + header.offset[1];
    p.z = le.get<std::int32_t>(base + 8) * header.scale[2] + header.offset[2];

    LasPointAttributes attr;
    attr.intensity = le.get<std::uint16_t>(base + 12);
    const std::uint8_t returns = bytes[base + 14];
    if (legacy) {
      attr.return_number = returns & 0x07;
      attr.number_of_returns = (returns >> 3) & 0x07;
      attr.scan_direction = (returns >> 6) & 1;
      attr.edge_of_flight_line = (returns >> 7) & 1;
      p.label = bytes[base + 15] & 0x1F;
      attr.scan_angle_degrees = static_cast<std::int8_t>(bytes[base + 16]);
      if (fmt == 1 || fmt >= 3) attr.gps_time = le.get<double>(base + 20);
      if (fmt == 2) {
        attr.rgb = {le.get<std::uint16_t>(base + 20), le.get<std::uint16_t>(base + 22),
                    le.get<std::uint16_t>(base + 24)};
      } else if (fmt == 3 || fmt == 5) {
        attr.rgb = {le.get<std::uint16_t>(base + 28), le.get<std::uint16_t>(base + 30),
                    le.get<std::uint16_t>(base + 32)};
      }
    } else {
      attr.return_number = returns & 0x0F;
      attr.number_of_returns = (returns >> 4) & 0x0F;
      const std::uint8_t flags = bytes[base + 15];
      attr.scan_direction = (flags >> 6) & 1;
      attr.edge_of_flight_line = (flags >> 7) & 1;
      p.label = bytes[base + 16];
      attr.scan_angle_degrees = le.get<std::int16_t>(base + 18) * 0.006;
      attr.gps_time = le.get<double>(base + 22);
      if (fmt >= 7) {
        attr.rgb = {le.get<std::uint16_t>(base + 30), le.get<std::uint16_t>(base + 32),
                    le.get<std::uint16_t>(base + 34)};
      }
    }
    points.push_back(p);
    result.attributes.push_back(attr);
  }

  result.cloud = make_cloud(std::move(points), source);
  return result;
}

LasReadResult read_las(const std::filesystem::path& path) {
  return parse_las(slurp(path), path.string());
}

// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_label(std::string_view s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec == std::errc() && ptr == s.data() + s.size()) return true;
  // Accept integral floats such as "2.0".
  double d = 0.0;
  if (parse_double(s, d) && d == std::floor(d) && std::abs(d) < 1e9) {
    out = static_cast<int>(d);
    return true;
  }
  return false;
}

}  // namespace

PointCloud parse_csv(const std::string& text, bool has_label, const std::string& source) {
  std::vector<Point3> points;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  std::size_t width = 0;
  bool first_content_row = true;
  const std::size_t needed = has_label ? 4 : 3;

  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    const auto err = [&](const std::string& what) {
      return Error(ErrorCode::kParse, source + ": row " + std::to_string(row) + ": " + what);
    };

    if (first_content_row) {
      first_content_row = false;
      double probe = 0.0;
      const bool numeric = std::all_of(fields.begin(), fields.end(), [&](std::string_view f) {
        return parse_double(f, probe);
      });
      if (!numeric) continue;  // header row
    }
    if (width == 0) {
      width = fields.size();
      if (width < needed) {
        throw err("expected at least " + std::to_string(needed) + " columns, found " +
                  std::to_string(width));
      }
    } else if (fields.size() != width) {
      throw err("ragged row: expected " + std::to_string(width) + " columns, found " +
                std::to_string(fields.size()));
    }

    Point3 p;
    double* coords[3] = {&p.x, &p.y, &p.z};
    for (int axis = 0; axis < 3; ++axis) {
      if (!parse_double(fields[axis], *coords[axis])) {
        throw err("non-numeric coordinate '" + std::string(fields[axis]) + "'");
      }
    }
    if (has_label) {
      int label = 0;
      if (!parse_label(fields[3], label)) {
        throw err("non-integer label '" + std::string(fields[3]) + "'");
      }
      p.label = label;
    }
    points.push_back(p);
  }
  return make_cloud(std::move(points), source);
}

PointCloud read_csv(const std::filesystem::path& path, bool has_label) {
  const auto bytes = slurp(path);
  return parse_csv(std::string(bytes.begin(), bytes.end()), has_label, path.string());
}

// ---------------------------------------------------------------------------

NormalizeMode parse_normalize_mode(const std::string& name) {
  if (name == "per-axis") return NormalizeMode::kPerAxis;
  if (name == "uniform") return NormalizeMode::kUniform;
  throw Error(ErrorCode::kConfiguration, "unknown normalization mode '" + name + "'");
}

const char* to_string(NormalizeMode mode) {
  return mode == NormalizeMode::kPerAxis ? "per-axis" : "uniform";
}

PointCloud normalize_unit_cube(const PointCloud& cloud, NormalizeMode mode) {
  if (cloud.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot normalize an empty point cloud");
  }
  if (cloud.normalized) {
    throw Error(ErrorCode::kConfiguration, cloud.source + ": point cloud is already normalized");
  }
  const AxisBounds b = compute_bounds(cloud.points);
  std::array<double, 3> extent{};
  for (int axis = 0; axis < 3; ++axis) extent[axis] = b.max[axis] - b.min[axis];
  const double longest = *std::max_element(extent.begin(), extent.end());

  std::array<double, 3> scale{};
  std::array<double, 3> shift{};
  for (int axis = 0; axis < 3; ++axis) {
    if (mode == NormalizeMode::kPerAxis) {
      scale[axis] = extent[axis];
      shift[axis] = 0.0;
    } else {
      scale[axis] = longest;
      shift[axis] = longest > 0.0 ? 0.5 * (1.0 - extent[axis] / longest) : 0.0;
    }
  }

  PointCloud out;
  out.source = cloud.source;
  out.bounds = b;
  out.normalized = true;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    Point3 q = p;
    double* coords[3] = {&q.x, &q.y, &q.z};
    for (int axis = 0; axis < 3; ++axis) {
      if (extent[axis] == 0.0) {
        *coords[axis] = 0.5;
      } else {
        const double t = (p[axis] - b.min[axis]) / scale[axis] + shift[axis];
        *coords[axis] = std::clamp(t, 0.0, 1.0);
      }
    }
    out.points.push_back(q);
  }
  return out;
}

}  // namespace prodcoef
