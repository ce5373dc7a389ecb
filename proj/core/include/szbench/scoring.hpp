#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "szbench/events.hpp"

namespace szbench::scoring {

// Event-scoring parameters plus the sample-scoring granularity. Defaults are
// the challenge operating point.
struct ScoringParams {
  double min_overlap_s = 0.0;          // 0 means any positive overlap counts
  double preictal_tolerance_s = 30.0;  // detection credit before the onset
  double postictal_tolerance_s = 60.0; // detection credit after the end
  double merge_gap_s = 90.0;           // merge events separated by less than this
  double max_event_s = 300.0;          // split events longer than this
  double sample_period_s = 1.0;        // sample-based scoring granularity

  friend bool operator==(const ScoringParams&, const ScoringParams&) = default;
};

struct Counts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long ref_total = 0;  // reference events after regularization (tp + fn)
  long hyp_total = 0;
  double duration_s = 0.0;

  friend Counts operator+(const Counts& a, const Counts& b) {
    return {a.tp + b.tp, a.fp + b.fp, a.fn + b.fn,
            a.ref_total + b.ref_total, a.hyp_total + b.hyp_total,
            a.duration_s + b.duration_s};
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

// Undefined metrics (0/0 cases) stay empty; reports render them as blank
// cells instead of fabricating a 0 or 1.
struct Metrics {
  std::optional<double> sensitivity;
  std::optional<double> precision;
  std::optional<double> f1;
  std::optional<double> fp_per_day;
};

// Per-event matching detail, kept for the cross-algorithm agreement analysis.
struct MatchDetail {
  struct RefMatch {
    bool detected = false;
    std::vector<std::size_t> hyp_indices;  // hypotheses supporting the detection
  };
  std::vector<RefMatch> ref;                 // per regularized reference event
  std::vector<bool> hyp_overlaps_reference;  // false -> the hypothesis is an FP
};

// Replaces any run of events whose consecutive gaps are < merge_gap_s with a
// single spanning event (applied transitively). Overlapping or touching
// events (gap <= 0) always merge. Input must be sorted by onset.
EventList merge_events(const EventList& list, double merge_gap_s);

// Splits every event strictly longer than max_event_s into back-to-back
// fragments of max_event_s, the last one the remainder. Input must be sorted
// and non-overlapping.
EventList split_events(const EventList& list, double max_event_s);

// merge_events then split_events, in that order; marks the result
// regularized. Applied identically to reference and hypothesis lists.
EventList regularize(const EventList& list, const ScoringParams& params);

struct Interval {
  double onset_s = 0.0;
  double offset_s = 0.0;
};

// Tolerance zones used for matching only: each reference event grows by the
// pre-/post-ictal tolerances, clipped to the recording. Zones may overlap.
std::vector<Interval> extend_reference(const EventList& regularized_ref,
                                       const ScoringParams& params);

// Overlap matching of two regularized lists on one recording. A reference
// event counts detected when some hypothesis overlaps its tolerance zone by
// more than min_overlap_s (any positive overlap when that is 0); a hypothesis
// with positive overlap against any zone is never an FP; one hypothesis may
// support several detections. Throws ContractError on duration mismatch.
std::pair<Counts, MatchDetail> match_events(const EventList& ref, const EventList& hyp,
                                            const ScoringParams& params);

// Full event-based pipeline: regularize both lists, extend the reference,
// match. Accepts raw or already-regularized lists.
Counts score_event_based(const EventList& ref, const EventList& hyp,
                         const ScoringParams& params);

// Sample-based scoring on the raw lists: the recording is cut into
// ceil(duration / sample_period_s) samples and a sample is positive when it
// intersects any event. No tolerances, no merge/split.
Counts score_sample_based(const EventList& ref, const EventList& hyp,
                          const ScoringParams& params);

// sensitivity = tp/(tp+fn), precision = tp/(tp+fp), f1 their harmonic mean,
// fp_per_day = fp * 86400 / duration_s; each undefined when its denominator
// is zero (f1 also when sensitivity + precision == 0).
Metrics compute_metrics(const Counts& counts);

}  // namespace szbench::scoring
