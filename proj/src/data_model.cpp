#include "gazemetrics/data_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "gazemetrics/error.hpp"
#include "gazemetrics/text.hpp"

namespace gazemetrics {

namespace {

constexpr std::size_t kColumnCount = std::size(kSessionColumns);

std::optional<double> parse_optional_real(std::string_view field, std::size_t line, std::string_view column) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ParseError(line, "column " + std::string(column) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

template <typename Int>
Int parse_integer(std::string_view field, std::size_t line, std::string_view column) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line, "column " + std::string(column) + ": bad integer '" + std::string(field) + "'");
  }
  return v;
}

bool parse_flag(std::string_view field, std::size_t line, std::string_view column) {
  if (field == "1") return true;
  if (field == "0") return false;
  throw ParseError(line, "column " + std::string(column) + ": expected 0 or 1, got '" + std::string(field) + "'");
}

bool plausible_pupil(const std::optional<double>& d) { return d && *d > kPupilMinMm && *d < kPupilMaxMm; }

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

void check_header(std::string_view header) {
  const auto cols = split(strip_cr(header), '\t');
  for (const auto expected : kSessionColumns) {
    if (std::find(cols.begin(), cols.end(), expected) == cols.end()) {
      throw SchemaError("session header is missing column '" + std::string(expected) + "'");
    }
  }
  if (cols.size() != kColumnCount) {
    throw SchemaError("session header has " + std::to_string(cols.size()) + " columns, expected " +
                      std::to_string(kColumnCount));
  }
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    if (cols[i] != kSessionColumns[i]) {
      throw SchemaError("session column " + std::to_string(i + 1) + " is '" + std::string(cols[i]) + "', expected '" +
                        std::string(kSessionColumns[i]) + "'");
    }
  }
}

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point a, Point b, Point c, Point d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

void check_simple(const AoiPolygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  const std::string id = poly.stimulus_id + "/" + std::string(to_string(poly.aoi_name));
  if (n < 3) throw DegeneratePolygon(id + ": polygon needs at least 3 vertices, got " + std::to_string(n));

  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    if (a == b) throw DegeneratePolygon(id + ": repeated consecutive vertex");
    twice_area += a.x * b.y - b.x * a.y;
  }
  if (twice_area == 0.0) throw DegeneratePolygon(id + ": polygon has zero area");

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_touch(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
        throw DegeneratePolygon(id + ": polygon edges " + std::to_string(i) + " and " + std::to_string(j) +
                                " intersect");
      }
    }
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

std::vector<TrialRecord> parse_session(std::istream& in) {
  std::vector<TrialRecord> trials;
  std::set<std::pair<std::string, std::string>> finished;

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw SchemaError("session file is empty");
  ++line_no;
  check_header(line);

  std::size_t block_start_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_cr(line);
    if (text.empty()) continue;
    const auto f = split(text, '\t');
    if (f.size() != kColumnCount) {
      throw ParseError(line_no, "expected " + std::to_string(kColumnCount) + " fields, got " +
                                    std::to_string(f.size()));
    }

    const auto group = parse_group(f[1]);
    if (!group) throw ParseError(line_no, "unknown group '" + std::string(f[1]) + "'");
    const auto pain = parse_pain_label(f[3]);
    if (!pain) throw ParseError(line_no, "unknown pain_label '" + std::string(f[3]) + "'");
    if (f[0].empty()) throw ParseError(line_no, "empty participant_id");
    if (f[2].empty()) throw ParseError(line_no, "empty stimulus_id");
    const int rating = parse_integer<int>(f[4], line_no, "rating");

    GazeSample s;
    s.t_us = parse_integer<std::int64_t>(f[5], line_no, "t_us");
    s.gaze_x_px = parse_optional_real(f[6], line_no, "gaze_x_px");
    s.gaze_y_px = parse_optional_real(f[7], line_no, "gaze_y_px");
    s.pupil_left_mm = parse_optional_real(f[8], line_no, "pupil_left_mm");
    s.pupil_right_mm = parse_optional_real(f[9], line_no, "pupil_right_mm");
    s.valid_left = parse_flag(f[10], line_no, "valid_left") && plausible_pupil(s.pupil_left_mm);
    s.valid_right = parse_flag(f[11], line_no, "valid_right") && plausible_pupil(s.pupil_right_mm);

    const bool continues = !trials.empty() && trials.back().participant_id == f[0] && trials.back().stimulus_id == f[2];
    if (!continues) {
      if (!trials.empty()) finished.emplace(trials.back().participant_id, trials.back().stimulus_id);
      if (finished.count({std::string(f[0]), std::string(f[2])})) {
        throw ParseError(line_no, "trial " + std::string(f[0]) + "/" + std::string(f[2]) +
                                      " continues after another trial started");
      }
      TrialRecord t;
      t.participant_id = std::string(f[0]);
      t.group = *group;
      t.stimulus_id = std::string(f[2]);
      t.pain_label = *pain;
      t.rating = rating;
      trials.push_back(std::move(t));
      block_start_line = line_no;
    } else {
      const auto& t = trials.back();
      if (t.group != *group || t.pain_label != *pain || t.rating != rating) {
        throw ParseError(line_no, "group, pain_label or rating changes inside trial " + t.participant_id + "/" +
                                      t.stimulus_id + " (started at line " + std::to_string(block_start_line) +
                                      ")");
      }
      if (s.t_us <= t.samples.back().t_us) {
        throw MonotonicityError(line_no, "t_us " + std::to_string(s.t_us) + " does not increase in trial " +
                                             t.participant_id + "/" + t.stimulus_id);
      }
    }
    trials.back().samples.push_back(s);
  }
  return trials;
}

std::vector<TrialRecord> load_session(const std::filesystem::path& path, const RunConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open session file '" + path.string() + "'");
  auto trials = parse_session(in);

  // The pipeline grids samples at the configured rate; a file recorded at a
  // different rate would be silently decimated or stretched.
  const double nominal = config.sample_period_us();
  for (const auto& t : trials) {
    if (t.samples.size() < 3) continue;
    std::vector<std::int64_t> steps;
    steps.reserve(t.samples.size() - 1);
    for (std::size_t i = 1; i < t.samples.size(); ++i) steps.push_back(t.samples[i].t_us - t.samples[i - 1].t_us);
    std::nth_element(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
    const double median = static_cast<double>(steps[steps.size() / 2]);
    if (std::abs(median - nominal) > 0.25 * nominal) {
      throw SchemaError("trial " + t.participant_id + "/" + t.stimulus_id + ": median sample interval " +
                        format_double(median) + " us does not match sample_rate_hz " +
                        std::to_string(config.sample_rate_hz));
    }
  }
  return trials;
}

void write_session(std::ostream& out, const std::vector<TrialRecord>& trials) {
  for (std::size_t i = 0; i < kColumnCount; ++i) out << (i ? "\t" : "") << kSessionColumns[i];
  out << '\n';
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& t : trials) {
    const std::string prefix = t.participant_id + '\t' + std::string(to_string(t.group)) + '\t' + t.stimulus_id +
                               '\t' + std::string(to_string(t.pain_label)) + '\t' + std::to_string(t.rating) + '\t';
    for (const auto& s : t.samples) {
      out << prefix << s.t_us << '\t' << opt(s.gaze_x_px) << '\t' << opt(s.gaze_y_px) << '\t'
          << opt(s.pupil_left_mm) << '\t' << opt(s.pupil_right_mm) << '\t' << (s.valid_left ? '1' : '0') << '\t'
          << (s.valid_right ? '1' : '0') << '\n';
    }
  }
}

AoiLayout parse_aois(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("AOI file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw SchemaError("AOI file must be a JSON array");

  AoiLayout layout;
  std::set<std::pair<std::string, AoiName>> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    const std::string where = "AOI entry " + std::to_string(i);
    if (!obj.is_object()) throw SchemaError(where + " is not an object");
    for (const char* key : {"stimulus_id", "aoi_name", "vertices"}) {
      if (!obj.contains(key)) throw SchemaError(where + " lacks '" + key + "'");
    }
    if (!obj["stimulus_id"].is_string() || !obj["aoi_name"].is_string()) {
      throw SchemaError(where + ": stimulus_id and aoi_name must be strings");
    }
    AoiPolygon poly;
    poly.stimulus_id = obj["stimulus_id"].get<std::string>();
    const auto name_text = obj["aoi_name"].get<std::string>();
    const auto name = parse_aoi_name(name_text);
    if (!name) throw UnknownAoiName(where + ": '" + name_text + "' is not one of the 13 facial AOIs");
    poly.aoi_name = *name;

    const auto& verts = obj["vertices"];
    if (!verts.is_array()) throw SchemaError(where + ": vertices must be an array");
    for (const auto& v : verts) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw SchemaError(where + ": each vertex must be [x, y]");
      }
      poly.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    if (!seen.emplace(poly.stimulus_id, poly.aoi_name).second) {
      throw SchemaError(where + ": duplicate AOI " + name_text + " for stimulus " + poly.stimulus_id);
    }
    check_simple(poly);
    layout[poly.stimulus_id].push_back(std::move(poly));
  }
  return layout;
}

AoiLayout load_aois(const std::filesystem::path& path) { return parse_aois(read_file(path)); }

std::string aois_to_json(const AoiLayout& layout) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& [stimulus, polys] : layout) {
    for (const auto& p : polys) {
      nlohmann::json verts = nlohmann::json::array();
      for (const auto& v : p.vertices) verts.push_back({v.x, v.y});
      doc.push_back({{"stimulus_id", stimulus}, {"aoi_name", std::string(to_string(p.aoi_name))}, {"vertices", verts}});
    }
  }
  return doc.dump(1) + "\n";
}

}  // namespace gazemetrics
