#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace szbench::edf {

// Per-signal header entry. Text fields are stored trimmed; digital samples are
// 16-bit two's complement little-endian in the data records.
struct SignalInfo {
  std::string label;
  std::string transducer;
  std::string physical_dimension;
  double physical_min = 0.0;
  double physical_max = 0.0;
  int digital_min = 0;
  int digital_max = 0;
  std::string prefiltering;
  int samples_per_record = 0;
  std::string reserved;

  // physical = digital * gain() + offset()
  double gain() const;
  double offset() const;
  bool is_annotation() const;  // "EDF Annotations" signal of EDF+ files

  friend bool operator==(const SignalInfo&, const SignalInfo&) = default;
};

struct EdfHeader {
  std::string version = "0";
  std::string patient_id;
  std::string recording_id;
  // Start date/time as stored: dd.mm.yy / hh.mm.ss (two-digit year).
  int start_day = 1;
  int start_month = 1;
  int start_year = 85;
  int start_hour = 0;
  int start_minute = 0;
  int start_second = 0;
  std::string reserved;            // "" plain EDF, "EDF+C" continuous EDF+
  std::int64_t num_records = -1;   // -1 until resolved against the file size
  double record_duration_s = 1.0;
  std::vector<SignalInfo> signals;

  int header_bytes() const { return 256 + 256 * static_cast<int>(signals.size()); }
  std::int64_t record_bytes() const;  // sum over signals of 2 * samples_per_record

  friend bool operator==(const EdfHeader&, const EdfHeader&) = default;
};

// Channel samples in physical units (microvolts for EEG). Sampling rate is
// kept per channel; the standardizer requires the channels it consumes to
// share one rate.
struct SignalMatrix {
  std::vector<std::string> channels;
  std::vector<double> fs_hz;
  std::vector<std::vector<double>> samples;
  double duration_s = 0.0;

  std::size_t channel_count() const { return channels.size(); }
  double common_fs() const;  // throws ContractError when channels disagree
};

// num_records * record_duration_s; throws ContractError when unresolved.
double recording_duration(const EdfHeader& header);

// Streaming reader: the header is parsed on open and num_records == -1 is
// resolved from the file size (truncated to whole records, with a warning).
// Whole multi-hour files never need to be resident at once.
class EdfReader {
 public:
  explicit EdfReader(const std::filesystem::path& path);

  const EdfHeader& header() const { return header_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  double duration_s() const;

  // Physical samples of records [first, first + count), one vector per signal
  // in header order. Annotation signals yield empty vectors.
  std::vector<std::vector<double>> read_records(std::int64_t first, std::int64_t count);

  // All records; annotation signals are dropped from the matrix.
  SignalMatrix read_all();

 private:
  std::filesystem::path path_;
  std::ifstream stream_;
  EdfHeader header_;
  std::vector<std::string> warnings_;
};

std::pair<EdfHeader, SignalMatrix> read_edf(const std::filesystem::path& path);

// Header-only peek; cheap (256 + 256 * ns bytes plus a stat).
EdfHeader read_edf_header(const std::filesystem::path& path);

// Writes a plain-EDF/EDF+C file. The header must be consistent with the
// matrix: channel count, per-channel sample count == samples_per_record *
// num_records, distinct physical and digital ranges.
void write_edf(const EdfHeader& header, const SignalMatrix& signals,
               const std::filesystem::path& path);

// Builds a consistent header for a matrix: per-channel physical range taken
// from the data (padded 1%), 16-bit digital range, blank patient/recording
// fields. Sample counts must be a whole number of records.
EdfHeader make_header(const SignalMatrix& signals, double record_duration_s = 1.0);

}  // namespace szbench::edf
