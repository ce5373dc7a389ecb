#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <random>
#include <string>

#include "helpers.hpp"
#include "szbench/edf.hpp"
#include "szbench/errors.hpp"

using namespace szbench;
using test::TempDir;

namespace {

std::string pad(std::string s, std::size_t width) {
  s.resize(width, ' ');
  return s;
}

// Minimal one-signal EDF built by hand, independent of write_edf: 4 samples
// with digital values 0, 1, -1, 32767 on a -3200..3200 uV scale.
std::string handmade_edf() {
  std::string h;
  h += pad("0", 8);
  h += pad("patient", 80);
  h += pad("recording", 80);
  h += pad("02.03.24", 8);
  h += pad("10.20.30", 8);
  h += pad("512", 8);
  h += pad("", 44);
  h += pad("1", 8);
  h += pad("1", 8);
  h += pad("1", 4);
  h += pad("C3", 16);
  h += pad("", 80);
  h += pad("uV", 8);
  h += pad("-3200", 8);
  h += pad("3200", 8);
  h += pad("-32768", 8);
  h += pad("32767", 8);
  h += pad("", 80);
  h += pad("4", 8);
  h += pad("", 32);

  const auto put_sample = [&h](std::int16_t v) {
    const auto u = static_cast<std::uint16_t>(v);
    h += static_cast<char>(u & 0xff);
    h += static_cast<char>(u >> 8);
  };
  put_sample(0);
  put_sample(1);
  put_sample(-1);
  put_sample(32767);
  return h;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

edf::SignalMatrix small_matrix(unsigned seed = 7) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 50.0);
  edf::SignalMatrix m;
  m.channels = {"C3", "C4"};
  m.fs_hz = {256.0, 256.0};
  m.samples.resize(2);
  for (auto& ch : m.samples) {
    ch.resize(256 * 3);
    for (auto& v : ch) v = noise(rng);
  }
  m.duration_s = 3.0;
  return m;
}

}  // namespace

TEST_CASE("hand-built file decodes to the documented physical scale") {
  TempDir tmp;
  const auto path = tmp / "hand.edf";
  write_bytes(path, handmade_edf());

  edf::EdfReader reader(path);
  const auto& h = reader.header();
  CHECK(h.patient_id == "patient");
  CHECK(h.recording_id == "recording");
  CHECK(h.start_day == 2);
  CHECK(h.start_month == 3);
  CHECK(h.start_year == 24);
  CHECK(h.start_hour == 10);
  CHECK(h.num_records == 1);
  CHECK(h.record_duration_s == 1.0);
  REQUIRE(h.signals.size() == 1);
  CHECK(h.signals[0].label == "C3");
  CHECK(h.signals[0].samples_per_record == 4);

  // Independent scale: 6400 uV over 65535 digital steps, anchored at the
  // digital minimum.
  const double gain = 6400.0 / 65535.0;
  const double offset = -3200.0 - (-32768.0) * gain;
  CHECK(gain == doctest::Approx(h.signals[0].gain()).epsilon(1e-12));

  const auto m = reader.read_all();
  REQUIRE(m.channel_count() == 1);
  REQUIRE(m.samples[0].size() == 4);
  CHECK(m.samples[0][0] == doctest::Approx(offset).epsilon(1e-12));
  CHECK(m.samples[0][1] == doctest::Approx(1.0 * gain + offset).epsilon(1e-12));
  CHECK(m.samples[0][2] == doctest::Approx(-1.0 * gain + offset).epsilon(1e-12));
  CHECK(m.samples[0][3] == doctest::Approx(32767.0 * gain + offset).epsilon(1e-12));
  CHECK(m.samples[0][0] == doctest::Approx(0.048828).epsilon(1e-4));
}

TEST_CASE("write then read returns samples within half a quantization step") {
  TempDir tmp;
  const auto path = tmp / "rt.edf";
  const auto m = small_matrix();
  const auto header = edf::make_header(m);
  edf::write_edf(header, m, path);

  const auto [h2, m2] = edf::read_edf(path);
  CHECK(h2.num_records == 3);
  CHECK(h2.signals.size() == 2);
  REQUIRE(m2.channel_count() == 2);
  CHECK(m2.channels == m.channels);

  for (std::size_t c = 0; c < 2; ++c) {
    const double step = h2.signals[c].gain();
    REQUIRE(m2.samples[c].size() == m.samples[c].size());
    for (std::size_t i = 0; i < m.samples[c].size(); ++i) {
      CHECK(std::abs(m2.samples[c][i] - m.samples[c][i]) <= step / 2 + 1e-12);
    }
  }
}

TEST_CASE("header text fields survive a round trip") {
  TempDir tmp;
  const auto path = tmp / "hdr.edf";
  const auto m = small_matrix();
  auto header = edf::make_header(m);
  header.patient_id = "X F X sub-42";
  header.recording_id = "Startdate 01-JAN-2024";
  header.start_day = 29;
  header.start_month = 2;
  header.start_year = 24;
  header.signals[0].transducer = "AgAgCl electrode";
  header.signals[0].prefiltering = "HP:0.1Hz LP:75Hz";
  edf::write_edf(header, m, path);

  const auto h2 = edf::read_edf_header(path);
  CHECK(h2.patient_id == header.patient_id);
  CHECK(h2.recording_id == header.recording_id);
  CHECK(h2.start_day == 29);
  CHECK(h2.signals[0].transducer == "AgAgCl electrode");
  CHECK(h2.signals[0].prefiltering == "HP:0.1Hz LP:75Hz");
}

TEST_CASE("unknown record count is resolved from the file size") {
  TempDir tmp;
  const auto path = tmp / "unk.edf";
  const auto m = small_matrix();
  edf::write_edf(edf::make_header(m), m, path);

  auto bytes = read_bytes(path);
  bytes.replace(236, 8, pad("-1", 8));  // num_records field
  write_bytes(path, bytes);

  edf::EdfReader reader(path);
  CHECK(reader.header().num_records == 3);
  CHECK(reader.warnings().empty());
  CHECK(reader.duration_s() == 3.0);
}

TEST_CASE("partial trailing record is truncated with a warning") {
  TempDir tmp;
  const auto path = tmp / "part.edf";
  const auto m = small_matrix();
  edf::write_edf(edf::make_header(m), m, path);

  auto bytes = read_bytes(path);
  bytes.replace(236, 8, pad("-1", 8));
  bytes += std::string(100, '\0');  // not a whole record (one record is 1024 bytes)
  write_bytes(path, bytes);

  edf::EdfReader reader(path);
  CHECK(reader.header().num_records == 3);
  REQUIRE(reader.warnings().size() == 1);
  CHECK(reader.warnings()[0].find("truncated") != std::string::npos);
}

TEST_CASE("declared records beyond the file size name the failing offset") {
  TempDir tmp;
  const auto path = tmp / "short.edf";
  const auto m = small_matrix();
  edf::write_edf(edf::make_header(m), m, path);

  auto bytes = read_bytes(path);
  bytes.resize(bytes.size() - 512);  // chop half a record
  write_bytes(path, bytes);

  try {
    edf::EdfReader reader(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() == static_cast<std::int64_t>(bytes.size()));
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
  }
}

TEST_CASE("discontinuous EDF+ files are rejected") {
  TempDir tmp;
  const auto path = tmp / "d.edf";
  auto bytes = handmade_edf();
  bytes.replace(192, 5, "EDF+D");
  write_bytes(path, bytes);
  CHECK_THROWS_AS(edf::EdfReader{path}, ParseError);
}

TEST_CASE("continuous EDF+ marker is accepted") {
  TempDir tmp;
  const auto path = tmp / "c.edf";
  auto bytes = handmade_edf();
  bytes.replace(192, 5, "EDF+C");
  write_bytes(path, bytes);
  CHECK(edf::EdfReader{path}.header().reserved == "EDF+C");
}

TEST_CASE("malformed headers raise parse errors, never crashes") {
  TempDir tmp;
  const auto base = handmade_edf();

  const auto corrupt = [&](std::size_t at, const std::string& with) {
    auto bytes = base;
    bytes.replace(at, with.size(), with);
    const auto path = tmp / "bad.edf";
    write_bytes(path, bytes);
    CHECK_THROWS_AS(edf::EdfReader{path}, ParseError);
  };

  corrupt(0, pad("9", 8));            // wrong version
  corrupt(184, pad("999", 8));        // header size disagrees with signal count
  corrupt(168, pad("xx.03.24", 8));   // non-numeric date
  corrupt(236, pad("abc", 8));        // non-numeric record count
  corrupt(244, pad("0", 8));          // zero record duration
  corrupt(252, pad("0", 4));          // zero signals
  corrupt(256 + 16 + 80 + 8, pad("3200", 8));  // physical min == max
}

TEST_CASE("annotation signals are skipped in the matrix but kept in the header") {
  TempDir tmp;
  const auto path = tmp / "annot.edf";

  // Two signals: one data channel and one annotation stream.
  std::string h;
  h += pad("0", 8) + pad("", 80) + pad("", 80) + pad("01.01.24", 8) + pad("00.00.00", 8);
  h += pad("768", 8) + pad("EDF+C", 44) + pad("1", 8) + pad("1", 8) + pad("2", 4);
  h += pad("Cz", 16) + pad("EDF Annotations", 16);
  h += pad("", 80) + pad("", 80);
  h += pad("uV", 8) + pad("", 8);
  h += pad("-100", 8) + pad("-1", 8);
  h += pad("100", 8) + pad("1", 8);
  h += pad("-32768", 8) + pad("-32768", 8);
  h += pad("32767", 8) + pad("32767", 8);
  h += pad("", 80) + pad("", 80);
  h += pad("2", 8) + pad("4", 8);
  h += pad("", 32) + pad("", 32);
  h += std::string(2 * 2 + 4 * 2, '\0');  // one record: 2 data + 4 annotation samples
  write_bytes(path, h);

  edf::EdfReader reader(path);
  REQUIRE(reader.header().signals.size() == 2);
  CHECK(reader.header().signals[1].is_annotation());

  const auto records = reader.read_records(0, 1);
  REQUIRE(records.size() == 2);
  CHECK(records[0].size() == 2);
  CHECK(records[1].empty());

  const auto m = reader.read_all();
  REQUIRE(m.channel_count() == 1);
  CHECK(m.channels[0] == "Cz");
}

TEST_CASE("record reads are bounds-checked and match the full read") {
  TempDir tmp;
  const auto path = tmp / "slice.edf";
  const auto m = small_matrix();
  edf::write_edf(edf::make_header(m), m, path);

  edf::EdfReader reader(path);
  CHECK_THROWS_AS(reader.read_records(0, 4), ContractError);
  CHECK_THROWS_AS(reader.read_records(-1, 1), ContractError);
  CHECK_THROWS_AS(reader.read_records(3, 1), ContractError);

  const auto full = reader.read_all();
  const auto r1 = reader.read_records(1, 1);
  for (std::size_t c = 0; c < 2; ++c) {
    REQUIRE(r1[c].size() == 256);
    for (std::size_t i = 0; i < 256; ++i) {
      CHECK(r1[c][i] == full.samples[c][256 + i]);
    }
  }
}

TEST_CASE("writer rejects inconsistent headers") {
  TempDir tmp;
  const auto m = small_matrix();
  auto header = edf::make_header(m);

  auto wrong_count = header;
  wrong_count.signals.pop_back();
  CHECK_THROWS_AS(edf::write_edf(wrong_count, m, tmp / "x.edf"), ContractError);

  auto wrong_samples = header;
  wrong_samples.num_records = 2;
  CHECK_THROWS_AS(edf::write_edf(wrong_samples, m, tmp / "x.edf"), ContractError);

  auto long_label = header;
  long_label.signals[0].label = "a label far too long for sixteen bytes";
  CHECK_THROWS_AS(edf::write_edf(long_label, m, tmp / "x.edf"), ContractError);
}

TEST_CASE("make_header requires whole records and equal record counts") {
  auto m = small_matrix();
  m.samples[0].resize(256 * 3 - 10);
  CHECK_THROWS_AS(edf::make_header(m), ContractError);

  auto m2 = small_matrix();
  m2.fs_hz[1] = 200.5;
  CHECK_THROWS_AS(edf::make_header(m2), ContractError);
}

TEST_CASE("matrix sampling-rate consensus") {
  auto m = small_matrix();
  CHECK(m.common_fs() == 256.0);
  m.fs_hz[1] = 128.0;
  CHECK_THROWS_AS(m.common_fs(), ContractError);
}
