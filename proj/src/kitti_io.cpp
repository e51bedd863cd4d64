#include "mono3d/kitti_io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace mono3d {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
      ++i;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
      ++i;
    }
    if (i > start) {
      fields.push_back(line.substr(start, i - start));
    }
  }
  return fields;
}

double parse_double(std::string_view tok, int line_no, int field_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw NumericParseError(line_no, field_no,
                            "line " + std::to_string(line_no) + ", field " +
                                std::to_string(field_no) + ": not a number: '" +
                                std::string(tok) + "'");
  }
  return value;
}

void append_fixed(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  out += buf;
}

std::string format_label_line(const ObjectLabel& obj) {
  std::string line = obj.category;
  const double nums[] = {obj.truncation,
                         static_cast<double>(obj.occlusion),
                         obj.alpha,
                         obj.box2d.x1,
                         obj.box2d.y1,
                         obj.box2d.x2,
                         obj.box2d.y2,
                         obj.size.h,
                         obj.size.w,
                         obj.size.l,
                         obj.location.x,
                         obj.location.y,
                         obj.location.z,
                         obj.ry};
  for (double v : nums) {
    line += ' ';
    append_fixed(line, v);
  }
  if (obj.score) {
    line += ' ';
    append_fixed(line, *obj.score);
  }
  line += '\n';
  return line;
}

}  // namespace

std::vector<ObjectLabel> parse_label_file(std::string_view text) {
  std::vector<ObjectLabel> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) {
      continue;  // blank line
    }
    if (fields.size() != 15 && fields.size() != 16) {
      throw FieldCountError(line_no, static_cast<int>(fields.size()),
                            "line " + std::to_string(line_no) + ": expected 15 or 16 fields, got " +
                                std::to_string(fields.size()));
    }
    ObjectLabel obj;
    obj.category = std::string(fields[0]);
    double v[15];
    for (std::size_t f = 1; f < fields.size(); ++f) {
      v[f - 1] = parse_double(fields[f], line_no, static_cast<int>(f));
    }
    obj.truncation = v[0];
    obj.occlusion = static_cast<int>(v[1]);
    obj.alpha = v[2];
    obj.box2d = {v[3], v[4], v[5], v[6]};
    obj.size = {v[8], v[7], v[9]};  // file order h w l
    obj.location = {v[10], v[11], v[12]};
    obj.ry = v[13];
    if (fields.size() == 16) {
      obj.score = v[14];
    }
    out.push_back(std::move(obj));
  }
  return out;
}

ProjectionMatrix parse_calib_file(std::string_view text) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || (fields[0] != "P2:" && fields[0] != "P2")) {
      continue;
    }
    if (fields.size() != 13) {
      throw FieldCountError(line_no, static_cast<int>(fields.size()) - 1,
                            "line " + std::to_string(line_no) +
                                ": P2 needs 12 values, got " +
                                std::to_string(fields.size() - 1));
    }
    std::array<double, 12> m;
    for (int f = 1; f <= 12; ++f) {
      m[f - 1] = parse_double(fields[f], line_no, f);
    }
    return ProjectionMatrix(m);
  }
  throw MissingKey("calibration file has no P2 entry");
}

Difficulty assign_difficulty(const ObjectLabel& label) {
  if (label.is_dont_care()) {
    return Difficulty::kIgnored;
  }
  const double height = label.box2d.height();
  if (height >= 40.0 && label.occlusion == 0 && label.truncation <= 0.15) {
    return Difficulty::kEasy;
  }
  if (height >= 25.0 && label.occlusion <= 1 && label.truncation <= 0.30) {
    return Difficulty::kModerate;
  }
  if (height >= 25.0 && label.occlusion <= 2 && label.truncation <= 0.50) {
    return Difficulty::kHard;
  }
  return Difficulty::kIgnored;
}

std::string write_labels(const std::vector<ObjectLabel>& labels) {
  std::string out;
  for (const auto& obj : labels) {
    out += format_label_line(obj);
  }
  return out;
}

std::string write_detections(const std::vector<RecoveredDetection>& dets) {
  std::string out;
  for (const auto& det : dets) {
    ObjectLabel obj;
    obj.category = det.record.cls;
    obj.truncation = 0.0;
    obj.occlusion = 0;
    obj.box2d = det.record.box2d;
    obj.size = det.box.size;
    // Back to the file's bottom-face-center convention.
    obj.location = {det.box.center.x, det.box.center.y + det.box.size.h / 2.0,
                    det.box.center.z};
    obj.ry = det.box.ry;
    obj.alpha = ry_to_alpha(det.box.ry, det.box.center.x, det.box.center.z);
    obj.score = det.record.score;
    out += format_label_line(obj);
  }
  return out;
}

}  // namespace mono3d
