#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gazemetrics/data_model.hpp"
#include "gazemetrics/error.hpp"
#include "gazemetrics/text.hpp"

using namespace gazemetrics;

namespace {

TrialRecord make_trial(const std::string& participant, const std::string& stimulus, std::size_t n,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> px(0.0, 1920.0);
  std::uniform_real_distribution<double> mm(2.0, 6.0);
  TrialRecord t;
  t.participant_id = participant;
  t.group = seed % 2 ? Group::NonExpert : Group::Expert;
  t.stimulus_id = stimulus;
  t.pain_label = seed % 3 ? PainLabel::Pain : PainLabel::Rest;
  t.rating = static_cast<int>(seed % 11);
  for (std::size_t i = 0; i < n; ++i) {
    GazeSample s;
    s.t_us = 1'000'000 + static_cast<std::int64_t>(i) * 3333;
    if (i % 17 != 5) {
      s.gaze_x_px = px(rng);
      s.gaze_y_px = px(rng) / 2.0;
    }
    if (i % 11 != 3) {
      s.pupil_left_mm = mm(rng);
      s.valid_left = true;
    }
    if (i % 13 != 7) {
      s.pupil_right_mm = mm(rng);
      s.valid_right = true;
    }
    t.samples.push_back(s);
  }
  return t;
}

std::string serialize(const std::vector<TrialRecord>& trials) {
  std::ostringstream out;
  write_session(out, trials);
  return out.str();
}

std::vector<TrialRecord> reparse(const std::string& text) {
  std::istringstream in(text);
  return parse_session(in);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string aoi_entry(const std::string& name, const std::string& vertices) {
  return R"({"stimulus_id": "S01", "aoi_name": ")" + name + R"(", "vertices": )" + vertices + "}";
}

}  // namespace

TEST(Session, TwoTrialsKeepSampleCounts) {
  const std::vector<TrialRecord> trials = {make_trial("P001", "S01", 40, 1), make_trial("P001", "S02", 25, 2)};
  const auto loaded = reparse(serialize(trials));
  ASSERT_EQ(loaded.size(), 2U);
  EXPECT_EQ(loaded[0].samples.size(), 40U);
  EXPECT_EQ(loaded[1].samples.size(), 25U);
  EXPECT_EQ(loaded[1].stimulus_id, "S02");
}

TEST(Session, RoundTripIsExact) {
  std::vector<TrialRecord> trials;
  for (int i = 0; i < 6; ++i) trials.push_back(make_trial("P00" + std::to_string(i), "S01", 120, 10 + i));
  const auto once = reparse(serialize(trials));
  EXPECT_EQ(once, trials);
  EXPECT_EQ(serialize(once), serialize(trials));
}

TEST(Session, ImplausiblePupilIsKeptButInvalid) {
  auto t = make_trial("P001", "S01", 5, 4);
  t.samples[2].pupil_left_mm = 15.2;
  t.samples[2].valid_left = true;
  t.samples[3].pupil_right_mm = 0.4;
  t.samples[3].valid_right = true;
  const auto loaded = reparse(serialize({t}));
  ASSERT_EQ(loaded[0].samples.size(), 5U);
  EXPECT_EQ(loaded[0].samples[2].pupil_left_mm, 15.2);
  EXPECT_FALSE(loaded[0].samples[2].valid_left);
  EXPECT_FALSE(loaded[0].samples[3].valid_right);
}

TEST(Session, ShuffledTimestampsNameFirstOffendingLine) {
  const auto text = serialize({make_trial("P001", "S01", 30, 5)});
  auto lines = lines_of(text);
  std::swap(lines[8], lines[12]);  // data rows 7 and 11, file lines 9 and 13
  try {
    reparse(join_lines(lines));
    FAIL() << "expected MonotonicityError";
  } catch (const MonotonicityError& e) {
    EXPECT_EQ(e.line(), 10U);  // first row whose time does not exceed its predecessor
  }
}

TEST(Session, RandomPermutationsAreAlwaysRejected) {
  const auto lines = lines_of(serialize({make_trial("P001", "S01", 20, 6)}));
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    auto shuffled = lines;
    std::shuffle(shuffled.begin() + 1, shuffled.end(), rng);
    if (shuffled == lines) continue;
    EXPECT_THROW(reparse(join_lines(shuffled)), MonotonicityError);
  }
}

TEST(Session, DuplicateTimestampIsRejected) {
  auto t = make_trial("P001", "S01", 10, 7);
  t.samples[4].t_us = t.samples[3].t_us;
  EXPECT_THROW(reparse(serialize({t})), MonotonicityError);
}

TEST(Session, MissingColumnIsSchemaError) {
  auto lines = lines_of(serialize({make_trial("P001", "S01", 3, 8)}));
  lines[0] = lines[0].substr(0, lines[0].rfind('\t'));
  EXPECT_THROW(reparse(join_lines(lines)), SchemaError);
}

TEST(Session, MalformedFieldIsParseErrorWithLine) {
  auto lines = lines_of(serialize({make_trial("P001", "S01", 5, 8)}));
  auto fields = split(lines[3], '\t');
  std::string rebuilt;
  for (std::size_t i = 0; i < fields.size(); ++i) rebuilt += (i ? "\t" : "") + std::string(i == 8 ? "abc" : fields[i]);
  lines[3] = rebuilt;
  try {
    reparse(join_lines(lines));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4U);
  }
}

TEST(Session, WrongSampleRateIsSchemaError) {
  RunConfig config;
  config.sample_rate_hz = 60;
  const auto path = std::filesystem::temp_directory_path() / "gazemetrics_rate_check.tsv";
  {
    std::ofstream out(path);
    write_session(out, {make_trial("P001", "S01", 30, 3)});
  }
  EXPECT_THROW(load_session(path, config), SchemaError);
  EXPECT_NO_THROW(load_session(path, RunConfig{}));
  std::filesystem::remove(path);
}

TEST(Session, MissingFileIsIoError) {
  EXPECT_THROW(load_session("/nonexistent/session.tsv", RunConfig{}), IoError);
}

TEST(Aois, FourVertexNoseIsAccepted) {
  const auto layout = parse_aois("[" + aoi_entry("Nose", "[[0,0],[10,0],[10,10],[0,10]]") + "]");
  ASSERT_EQ(layout.at("S01").size(), 1U);
  EXPECT_EQ(layout.at("S01")[0].aoi_name, AoiName::Nose);
  EXPECT_EQ(layout.at("S01")[0].vertices.size(), 4U);
}

TEST(Aois, UnknownNameIsRejected) {
  EXPECT_THROW(parse_aois("[" + aoi_entry("Ear", "[[0,0],[10,0],[10,10]]") + "]"), UnknownAoiName);
}

TEST(Aois, TwoVertexPolygonIsDegenerate) {
  EXPECT_THROW(parse_aois("[" + aoi_entry("Chin", "[[0,0],[10,0]]") + "]"), DegeneratePolygon);
}

TEST(Aois, SelfIntersectingPolygonIsDegenerate) {
  EXPECT_THROW(parse_aois("[" + aoi_entry("Chin", "[[0,0],[10,10],[10,0],[0,10]]") + "]"), DegeneratePolygon);
}

TEST(Aois, MalformedJsonIsSchemaError) {
  EXPECT_THROW(parse_aois("{not json"), SchemaError);
  EXPECT_THROW(parse_aois(R"([{"stimulus_id": "S01"}])"), SchemaError);
}

TEST(Aois, SerializationRoundTrips) {
  const std::string text = "[" + aoi_entry("Nose", "[[0,0],[10,0],[10,10],[0,10]]") + "," +
                           aoi_entry("Left Cheek", "[[20,0],[30,0],[25,8.5]]") + "]";
  const auto layout = parse_aois(text);
  const auto again = parse_aois(aois_to_json(layout));
  ASSERT_EQ(again.at("S01").size(), 2U);
  EXPECT_EQ(again.at("S01")[1].aoi_name, AoiName::LeftCheek);
  EXPECT_EQ(again.at("S01")[1].vertices, layout.at("S01")[1].vertices);
}

TEST(AoiNames, ClosedSetRoundTrips) {
  for (AoiName a : all_aoi_names()) EXPECT_EQ(parse_aoi_name(to_string(a)), a);
  EXPECT_FALSE(parse_aoi_name("Ear"));
  const auto& sorted = aoi_names_alphabetical();
  EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end(), AoiAlphabetical{}));
}
