#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "szbench/annotations.hpp"
#include "szbench/edf.hpp"
#include "szbench/events.hpp"

namespace szbench::test {

// Self-deleting scratch directory for filesystem tests.
class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "szbench-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Random event list on a quarter-second lattice. Lattice-aligned intervals
// make rasterized oracles exact: every onset/offset is a whole number of grid
// cells.
inline EventList random_lattice_events(std::mt19937& rng, double recording_duration_s,
                                       int max_events, double cell_s = 0.25) {
  const auto n_cells = static_cast<long>(recording_duration_s / cell_s);
  std::uniform_int_distribution<int> count(0, max_events);
  std::uniform_int_distribution<long> cell(0, n_cells - 1);
  std::uniform_int_distribution<long> length(1, 2400);  // up to 600 s at 0.25 s cells

  EventList list;
  list.recording_duration_s = recording_duration_s;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const long on = cell(rng);
    const long len = std::min(length(rng), n_cells - on);
    if (len <= 0) continue;
    list.events.push_back({static_cast<double>(on) * cell_s, static_cast<double>(len) * cell_s});
  }
  sort_by_onset(list);
  return list;
}

inline std::vector<double> sine_wave(double fs, double seconds, double hz, double amplitude = 1.0,
                                     double phase = 0.0) {
  std::vector<double> x(static_cast<std::size_t>(std::llround(fs * seconds)));
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = amplitude *
           std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs + phase);
  }
  return x;
}

inline edf::SignalMatrix make_matrix(std::vector<std::string> channels, double fs,
                                     std::vector<std::vector<double>> samples) {
  edf::SignalMatrix m;
  m.channels = std::move(channels);
  m.samples = std::move(samples);
  m.fs_hz.assign(m.channels.size(), fs);
  m.duration_s = m.samples.empty() ? 0.0 : static_cast<double>(m.samples[0].size()) / fs;
  return m;
}

// 19-channel matrix of mild Gaussian noise, canonical labels.
inline edf::SignalMatrix noise_matrix_19(std::mt19937& rng, double fs, double seconds,
                                         double sigma_uv = 20.0) {
  std::normal_distribution<double> noise(0.0, sigma_uv);
  const auto n = static_cast<std::size_t>(std::llround(fs * seconds));
  edf::SignalMatrix m;
  for (const char* label : {"Fp1", "F3", "C3", "P3", "O1", "F7", "T3", "T5", "Fz", "Cz",
                            "Pz", "Fp2", "F4", "C4", "P4", "O2", "F8", "T4", "T6"}) {
    m.channels.emplace_back(label);
    m.fs_hz.push_back(fs);
    std::vector<double> x(n);
    for (auto& v : x) v = noise(rng);
    m.samples.push_back(std::move(x));
  }
  m.duration_s = seconds;
  return m;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

// One BIDS recording: EDF from the matrix plus an events TSV next to it.
inline annotations::RecordingRef write_bids_recording(
    const std::filesystem::path& root, const std::string& sub, const std::string& ses,
    const std::string& run, const edf::SignalMatrix& matrix, const EventList& events,
    const std::string& task = annotations::kDefaultTask) {
  annotations::RecordingRef rec;
  rec.subject_id = sub;
  rec.session_id = ses;
  rec.run_id = run;
  rec.task = task;
  rec.duration_s = matrix.duration_s;

  const auto dir = root / ("sub-" + sub) / ("ses-" + ses) / "eeg";
  std::filesystem::create_directories(dir);
  rec.eeg_path = dir / ("sub-" + sub + "_ses-" + ses + "_task-" + task + "_run-" + run +
                        "_eeg.edf");
  edf::write_edf(edf::make_header(matrix), matrix, rec.eeg_path);

  const auto tsv = dir / rec.events_filename();
  annotations::write_events_tsv(events, tsv);
  rec.events_path = tsv;
  return rec;
}

}  // namespace szbench::test
