#pragma once

#include "szbench/edf.hpp"
#include "szbench/events.hpp"

namespace szbench::baseline {

// Band-power threshold detector. Meant as an end-to-end exercise of the
// pipeline and a non-trivial hypothesis generator, not a competitive
// algorithm.
struct BaselineConfig {
  double window_s = 5.0;
  double band_low_hz = 2.0;
  double band_high_hz = 40.0;
  double notch_hz = 50.0;
  double threshold_k = 3.0;   // multiplier on the per-recording power spread
  double min_event_s = 10.0;  // drop shorter detections
};

// Mean in-band power per non-overlapping window (after notch + band-pass),
// averaged across channels. Exposed for inspection and tests.
std::vector<double> window_band_powers(const edf::SignalMatrix& signals,
                                       const BaselineConfig& cfg);

// Windows whose power exceeds median + threshold_k * IQR of the recording's
// window powers become detections; consecutive positive windows join into one
// event and events shorter than min_event_s are dropped. The threshold is
// relative, so rescaling the whole recording leaves detections unchanged.
// A recording shorter than one window yields an empty list.
EventList detect(const edf::SignalMatrix& signals, const BaselineConfig& cfg = {});

}  // namespace szbench::baseline
