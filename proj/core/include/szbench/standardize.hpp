#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "szbench/annotations.hpp"
#include "szbench/edf.hpp"
#include "szbench/resample.hpp"

namespace szbench::standardize {

// The 19 channels of the classic 10-20 montage, in canonical output order.
inline constexpr std::array<const char*, 19> kCanonicalChannels = {
    "Fp1", "F3", "C3", "P3", "O1", "F7", "T3", "T5", "Fz", "Cz",
    "Pz",  "Fp2", "F4", "C4", "P4", "O2", "F8", "T4", "T6"};

// Maps raw channel labels to canonical ones. Matching is case-insensitive,
// strips an "EEG " prefix and reference suffixes ("-REF", "-LE", "-Avg",
// "-AR"), and knows the modern temporal-chain names (T7 -> T3 and friends).
// User aliases extend or override the built-ins.
class ChannelMap {
 public:
  ChannelMap();

  void add_alias(const std::string& raw_label, const std::string& canonical_label);
  std::optional<std::string> resolve(const std::string& raw_label) const;

 private:
  std::map<std::string, std::string> aliases_;  // normalized raw -> canonical
};

struct StandardizeConfig {
  double target_fs = 256.0;
  dsp::ResamplerSpec resampler;
  std::string task = annotations::kDefaultTask;
  int jobs = 1;
};

// Loads the conversion config file (JSON: target_fs, resampler parameters,
// alias table) on top of the given defaults. Format documented in the README.
void load_config_file(const std::filesystem::path& path, StandardizeConfig& cfg,
                      ChannelMap& map);

// Selects the 19 canonical channels in canonical order; extra channels are
// dropped. Throws StandardizeError listing the unresolvable labels, or a
// duplicate-source label when two inputs map to one canonical channel.
edf::SignalMatrix map_channels(const edf::SignalMatrix& signals, const ChannelMap& map);

// Subtracts the per-sample mean across channels. Requires >= 2 channels of
// equal length and rate.
edf::SignalMatrix common_average(const edf::SignalMatrix& signals);

// Resamples every channel to target_fs. An identity ratio is a bit-exact
// pass-through.
edf::SignalMatrix resample(const edf::SignalMatrix& signals, double target_fs,
                           const dsp::ResamplerSpec& spec = {});

struct ConversionOutcome {
  std::filesystem::path source;
  bool ok = false;
  std::string message;
  std::filesystem::path output;  // emitted EDF when ok
};

struct ConversionReport {
  std::vector<ConversionOutcome> entries;  // ordered by source path
  int n_ok = 0;
  int n_failed = 0;
};

// Converts every .edf under src into the canonical form (19 channels,
// common-average reference, target_fs) laid out as a BIDS tree under dst,
// each recording next to its events TSV. Annotations are taken from a
// sibling "<stem>_events.tsv" or "<stem>.tsv" when present; event times are
// carried through unchanged. Per-file failures are reported, never fatal;
// src is never written to.
ConversionReport standardize_dataset(const std::filesystem::path& src,
                                     const std::filesystem::path& dst,
                                     const StandardizeConfig& cfg, const ChannelMap& map);

}  // namespace szbench::standardize
