#include "szbench/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "szbench/dsp.hpp"
#include "szbench/errors.hpp"

namespace szbench::baseline {

namespace {

double percentile(std::vector<double> sorted_values, double p) {
  // Linear interpolation between order statistics; input must be sorted.
  const std::size_t n = sorted_values.size();
  const double pos = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

}  // namespace

std::vector<double> window_band_powers(const edf::SignalMatrix& signals,
                                       const BaselineConfig& cfg) {
  if (signals.channel_count() == 0) throw ContractError("no channels to detect on");
  if (!(cfg.window_s > 0)) throw ContractError("window length must be positive");
  const double fs = signals.common_fs();
  if (!(cfg.band_low_hz > 0) || !(cfg.band_low_hz < cfg.band_high_hz) ||
      !(cfg.band_high_hz < fs / 2)) {
    throw ContractError("detector band must satisfy 0 < low < high < fs/2");
  }

  std::vector<dsp::Biquad> sections;
  if (cfg.notch_hz > 0 && cfg.notch_hz < fs / 2) {
    sections.push_back(dsp::notch(cfg.notch_hz, 30.0, fs));
  }
  const auto bandpass = dsp::butterworth_bandpass(2, cfg.band_low_hz, cfg.band_high_hz, fs);
  sections.insert(sections.end(), bandpass.begin(), bandpass.end());

  const auto window = static_cast<std::size_t>(std::llround(cfg.window_s * fs));
  if (window == 0) throw ContractError("window shorter than one sample");
  const std::size_t n_samples = signals.samples[0].size();
  const std::size_t n_windows = n_samples / window;

  std::vector<double> powers(n_windows, 0.0);
  for (const auto& channel : signals.samples) {
    if (channel.size() != n_samples) throw ContractError("channels differ in length");
    const auto filtered = dsp::filtfilt(sections, channel);
    for (std::size_t w = 0; w < n_windows; ++w) {
      double acc = 0.0;
      const double* x = filtered.data() + w * window;
      for (std::size_t i = 0; i < window; ++i) acc += x[i] * x[i];
      powers[w] += acc / static_cast<double>(window);
    }
  }
  for (double& p : powers) p /= static_cast<double>(signals.channel_count());
  return powers;
}

EventList detect(const edf::SignalMatrix& signals, const BaselineConfig& cfg) {
  if (!(cfg.min_event_s >= 0)) throw ContractError("minimum event length must be >= 0");
  if (!(cfg.threshold_k >= 0)) throw ContractError("threshold multiplier must be >= 0");

  EventList out;
  out.recording_duration_s = signals.duration_s;

  const auto powers = window_band_powers(signals, cfg);
  if (powers.empty()) return out;

  std::vector<double> sorted = powers;
  std::sort(sorted.begin(), sorted.end());
  const double median = percentile(sorted, 0.5);
  const double iqr = percentile(sorted, 0.75) - percentile(sorted, 0.25);
  const double threshold = median + cfg.threshold_k * iqr;

  std::size_t w = 0;
  while (w < powers.size()) {
    if (powers[w] <= threshold) {
      ++w;
      continue;
    }
    std::size_t end = w;
    while (end < powers.size() && powers[end] > threshold) ++end;
    const double onset = static_cast<double>(w) * cfg.window_s;
    const double duration = static_cast<double>(end - w) * cfg.window_s;
    if (duration >= cfg.min_event_s) {
      Event e{onset, duration};
      if (e.offset_s() > out.recording_duration_s && out.recording_duration_s > onset) {
        e.duration_s = out.recording_duration_s - onset;
      }
      out.events.push_back(e);
    }
    w = end;
  }
  return out;
}

}  // namespace szbench::baseline
