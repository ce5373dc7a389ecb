#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "szbench/annotations.hpp"
#include "szbench/edf.hpp"
#include "szbench/errors.hpp"
#include "szbench/standardize.hpp"

using namespace szbench;
namespace fs = std::filesystem;

TEST_CASE("channel labels resolve through prefixes, suffixes, and case") {
  const standardize::ChannelMap map;

  CHECK(map.resolve("Fp1") == "Fp1");
  CHECK(map.resolve("EEG FP1-REF") == "Fp1");
  CHECK(map.resolve("EEG Fp1-LE") == "Fp1");
  CHECK(map.resolve("fp1-avg") == "Fp1");
  CHECK(map.resolve("FZ") == "Fz");
  CHECK(map.resolve("T7") == "T3");
  CHECK(map.resolve("EEG T8-REF") == "T4");
  CHECK(map.resolve("p7") == "T5");
  CHECK(map.resolve("P8-AR") == "T6");

  CHECK_FALSE(map.resolve("ECG").has_value());
  CHECK_FALSE(map.resolve("EEG A1-REF").has_value());
  CHECK_FALSE(map.resolve("").has_value());
}

TEST_CASE("user aliases extend and override the built-ins") {
  standardize::ChannelMap map;
  map.add_alias("X1", "Cz");
  CHECK(map.resolve("x1") == "Cz");
  CHECK(map.resolve("EEG X1-REF") == "Cz");

  map.add_alias("T7", "T5");  // override a built-in
  CHECK(map.resolve("T7") == "T5");

  CHECK_THROWS_AS(map.add_alias("Y1", "NotAChannel"), ContractError);
}

TEST_CASE("map_channels returns canonical order and drops extras") {
  std::mt19937 rng(3);
  auto m = test::noise_matrix_19(rng, 256.0, 2.0);

  // Shuffle into a messy vendor ordering with decorated names and extras.
  edf::SignalMatrix messy;
  messy.duration_s = m.duration_s;
  const std::vector<int> order{18, 3, 0, 7, 11, 5, 1, 9, 16, 2,
                               14, 6, 10, 4, 13, 8, 15, 12, 17};
  for (int idx : order) {
    messy.channels.push_back("EEG " + m.channels[static_cast<std::size_t>(idx)] + "-REF");
    messy.fs_hz.push_back(256.0);
    messy.samples.push_back(m.samples[static_cast<std::size_t>(idx)]);
  }
  messy.channels.push_back("ECG");
  messy.fs_hz.push_back(256.0);
  messy.samples.push_back(std::vector<double>(m.samples[0].size(), 1.0));

  const auto mapped = standardize::map_channels(messy, standardize::ChannelMap{});
  REQUIRE(mapped.channel_count() == 19);
  for (std::size_t i = 0; i < 19; ++i) {
    CHECK(mapped.channels[i] == standardize::kCanonicalChannels[i]);
    CHECK(mapped.samples[i] == m.samples[i]);
  }
}

TEST_CASE("missing channels are reported by name") {
  std::mt19937 rng(4);
  auto m = test::noise_matrix_19(rng, 256.0, 1.0);
  // Drop T6 and Pz.
  edf::SignalMatrix partial;
  partial.duration_s = m.duration_s;
  for (std::size_t i = 0; i < 19; ++i) {
    if (m.channels[i] == "T6" || m.channels[i] == "Pz") continue;
    partial.channels.push_back(m.channels[i]);
    partial.fs_hz.push_back(m.fs_hz[i]);
    partial.samples.push_back(m.samples[i]);
  }

  try {
    standardize::map_channels(partial, standardize::ChannelMap{});
    FAIL("expected StandardizeError");
  } catch (const StandardizeError& e) {
    CHECK(e.missing_channels() == std::vector<std::string>{"Pz", "T6"});
  }
}

TEST_CASE("two sources for one canonical channel are rejected") {
  std::mt19937 rng(5);
  auto m = test::noise_matrix_19(rng, 256.0, 1.0);
  m.channels[1] = "T7";  // F3 slot now collides with the true T3
  CHECK_THROWS_AS(standardize::map_channels(m, standardize::ChannelMap{}),
                  StandardizeError);
}

TEST_CASE("common average removes the cross-channel mean") {
  std::mt19937 rng(6);
  auto m = test::noise_matrix_19(rng, 256.0, 4.0);
  const auto car = standardize::common_average(m);

  REQUIRE(car.channel_count() == 19);
  const std::size_t n = car.samples[0].size();
  for (std::size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < 19; ++c) {
      sum += car.samples[c][t];
      scale = std::max(scale, std::abs(m.samples[c][t]));
    }
    CHECK(std::abs(sum) <= 1e-9 * std::max(1.0, scale));
  }

  // A matrix that already sums to zero at every sample is a fixed point.
  const auto twice = standardize::common_average(car);
  for (std::size_t c = 0; c < 19; ++c) {
    for (std::size_t t = 0; t < n; ++t) {
      CHECK(twice.samples[c][t] == doctest::Approx(car.samples[c][t]).epsilon(1e-12));
    }
  }
}

TEST_CASE("common average needs at least two equal-length channels") {
  edf::SignalMatrix one = test::make_matrix({"Cz"}, 256.0, {{1.0, 2.0}});
  CHECK_THROWS_AS(standardize::common_average(one), ContractError);

  edf::SignalMatrix ragged =
      test::make_matrix({"Cz", "Pz"}, 256.0, {{1.0, 2.0}, {1.0}});
  CHECK_THROWS_AS(standardize::common_average(ragged), ContractError);
}

TEST_CASE("matrix resample converts every channel to the target rate") {
  std::mt19937 rng(7);
  auto m = test::noise_matrix_19(rng, 512.0, 4.0);
  const auto out = standardize::resample(m, 256.0);
  REQUIRE(out.channel_count() == 19);
  for (std::size_t c = 0; c < 19; ++c) {
    CHECK(out.fs_hz[c] == 256.0);
    CHECK(out.samples[c].size() == 1024);
  }
  CHECK(out.duration_s == doctest::Approx(4.0));

  // Identity is bit exact.
  const auto same = standardize::resample(m, 512.0);
  for (std::size_t c = 0; c < 19; ++c) CHECK(same.samples[c] == m.samples[c]);
}

TEST_CASE("config file loads rates, task, and aliases") {
  test::TempDir tmp;
  const auto path = tmp / "convert.json";
  test::write_file(path, R"({
    "target_fs": 128.0,
    "task": "szMonitoring",
    "jobs": 3,
    "resampler": {"kaiser_beta": 6.0, "cutoff_ratio": 0.8, "zero_crossings": 32},
    "aliases": {"X1": "Cz", "EKG2": "Pz"}
  })");

  standardize::StandardizeConfig cfg;
  standardize::ChannelMap map;
  standardize::load_config_file(path, cfg, map);

  CHECK(cfg.target_fs == 128.0);
  CHECK(cfg.task == "szMonitoring");
  CHECK(cfg.jobs == 3);
  CHECK(cfg.resampler.kaiser_beta == 6.0);
  CHECK(cfg.resampler.cutoff_ratio == 0.8);
  CHECK(cfg.resampler.zero_crossings == 32);
  CHECK(map.resolve("x1") == "Cz");
  CHECK(map.resolve("ekg2") == "Pz");
}

TEST_CASE("config file rejects unknown keys and bad values") {
  test::TempDir tmp;
  standardize::StandardizeConfig cfg;
  standardize::ChannelMap map;

  const auto bad_key = tmp / "bad_key.json";
  test::write_file(bad_key, R"({"target_hz": 256})");
  CHECK_THROWS_AS(standardize::load_config_file(bad_key, cfg, map), ParseError);

  const auto bad_alias = tmp / "bad_alias.json";
  test::write_file(bad_alias, R"({"aliases": {"X1": "Elbow"}})");
  CHECK_THROWS_AS(standardize::load_config_file(bad_alias, cfg, map), ParseError);

  const auto not_json = tmp / "not.json";
  test::write_file(not_json, "target_fs: 256");
  CHECK_THROWS_AS(standardize::load_config_file(not_json, cfg, map), ParseError);

  CHECK_THROWS_AS(standardize::load_config_file(tmp / "absent.json", cfg, map), IoError);
}

TEST_CASE("dataset conversion builds a scoreable BIDS tree") {
  test::TempDir tmp;
  const auto src = tmp / "raw";
  const auto dst = src / "bids";  // destination inside the scanned tree
  std::mt19937 rng(8);

  // Two good recordings in a flat vendor layout plus one broken file.
  for (const char* name : {"patientA_rec1", "patientB_rec1"}) {
    auto m = test::noise_matrix_19(rng, 512.0, 8.0, 5.0);
    for (auto& label : m.channels) label = "EEG " + label + "-REF";
    fs::create_directories(src / name);
    const auto edf_path = src / name / (std::string(name) + ".edf");
    edf::write_edf(edf::make_header(m), m, edf_path);

    EventList events;
    events.recording_duration_s = 8.0;
    events.events.push_back({1.0, 2.5});
    annotations::write_events_tsv(events, src / name / (std::string(name) + "_events.tsv"));
  }
  test::write_file(src / "broken" / "broken.edf", "this is not an edf file");

  standardize::StandardizeConfig cfg;
  cfg.target_fs = 256.0;
  const auto report =
      standardize::standardize_dataset(src, dst, cfg, standardize::ChannelMap{});

  CHECK(report.n_ok == 2);
  CHECK(report.n_failed == 1);
  REQUIRE(report.entries.size() == 3);

  // The converted tree indexes cleanly and carries the events through.
  const auto index = annotations::index_dataset(dst);
  CHECK(index.errors.empty());
  REQUIRE(index.recordings.size() == 2);
  const auto all_events = annotations::load_reference_events(index);
  for (const auto& rec : index.recordings) {
    const auto header = edf::read_edf_header(rec.eeg_path);
    CHECK(header.signals.size() == 19);
    const auto matrix = edf::EdfReader(rec.eeg_path).read_all();
    CHECK(matrix.common_fs() == 256.0);
    CHECK(matrix.duration_s == doctest::Approx(8.0));

    const auto& events = all_events.at(rec.key());
    REQUIRE(events.events.size() == 1);
    CHECK(events.events[0].onset_s == 1.0);
    CHECK(events.events[0].duration_s == 2.5);
  }

  // Files already emitted under dst are not rescanned as inputs, so a
  // second run over the same tree converts the same two recordings, not four.
  const auto again =
      standardize::standardize_dataset(src, dst, cfg, standardize::ChannelMap{});
  CHECK(again.n_ok == 2);
  CHECK(again.n_failed == 1);
}

TEST_CASE("conversion reuses BIDS names when the source already has them") {
  test::TempDir tmp;
  const auto src = tmp / "raw";
  const auto dst = tmp / "out";
  std::mt19937 rng(9);

  auto m = test::noise_matrix_19(rng, 256.0, 4.0, 5.0);
  EventList none;
  none.recording_duration_s = 4.0;
  test::write_bids_recording(src, "07", "02", "03", m, none);

  standardize::StandardizeConfig cfg;
  const auto report =
      standardize::standardize_dataset(src, dst, cfg, standardize::ChannelMap{});
  REQUIRE(report.n_ok == 1);

  const auto index = annotations::index_dataset(dst);
  REQUIRE(index.recordings.size() == 1);
  CHECK(index.recordings[0].subject_id == "07");
  CHECK(index.recordings[0].session_id == "02");
  CHECK(index.recordings[0].run_id == "03");
}

TEST_CASE("converting an empty tree reports zero work") {
  test::TempDir tmp;
  fs::create_directories(tmp / "empty");
  standardize::StandardizeConfig cfg;
  const auto report = standardize::standardize_dataset(tmp / "empty", tmp / "out", cfg,
                                                       standardize::ChannelMap{});
  CHECK(report.n_ok == 0);
  CHECK(report.n_failed == 0);
  CHECK(report.entries.empty());
}
