#include "szbench/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "szbench/errors.hpp"

namespace szbench::scoring {

namespace {

void require_sorted(const EventList& list, const char* who) {
  if (!is_sorted_by_onset(list)) {
    throw ContractError(std::string(who) + " requires events sorted by onset");
  }
}

void require_same_recording(const EventList& ref, const EventList& hyp) {
  if (std::abs(ref.recording_duration_s - hyp.recording_duration_s) > 1e-6) {
    throw ContractError("reference and hypothesis disagree on the recording duration");
  }
}

}  // namespace

EventList merge_events(const EventList& list, double merge_gap_s) {
  require_sorted(list, "merge_events");

  EventList out;
  out.recording_duration_s = list.recording_duration_s;
  out.regularized = list.regularized;
  if (list.empty()) return out;

  double onset = list.events.front().onset_s;
  double offset = list.events.front().offset_s();
  for (std::size_t i = 1; i < list.events.size(); ++i) {
    const auto& e = list.events[i];
    const double gap = e.onset_s - offset;
    if (gap <= 0 || gap < merge_gap_s) {
      offset = std::max(offset, e.offset_s());
    } else {
      out.events.push_back({onset, offset - onset});
      onset = e.onset_s;
      offset = e.offset_s();
    }
  }
  out.events.push_back({onset, offset - onset});
  return out;
}

EventList split_events(const EventList& list, double max_event_s) {
  require_sorted(list, "split_events");
  if (!(max_event_s > 0)) throw ContractError("maximum event length must be positive");

  EventList out;
  out.recording_duration_s = list.recording_duration_s;
  out.regularized = list.regularized;
  for (const auto& e : list.events) {
    double onset = e.onset_s;
    double remaining = e.duration_s;
    while (remaining > max_event_s) {
      out.events.push_back({onset, max_event_s});
      onset += max_event_s;
      remaining -= max_event_s;
    }
    out.events.push_back({onset, remaining});
  }
  return out;
}

EventList regularize(const EventList& list, const ScoringParams& params) {
  EventList out = split_events(merge_events(list, params.merge_gap_s), params.max_event_s);
  out.regularized = true;
  return out;
}

std::vector<Interval> extend_reference(const EventList& regularized_ref,
                                       const ScoringParams& params) {
  std::vector<Interval> zones;
  zones.reserve(regularized_ref.size());
  for (const auto& e : regularized_ref.events) {
    zones.push_back({std::max(0.0, e.onset_s - params.preictal_tolerance_s),
                     std::min(regularized_ref.recording_duration_s,
                              e.offset_s() + params.postictal_tolerance_s)});
  }
  return zones;
}

std::pair<Counts, MatchDetail> match_events(const EventList& ref, const EventList& hyp,
                                            const ScoringParams& params) {
  require_same_recording(ref, hyp);
  require_sorted(ref, "match_events");
  require_sorted(hyp, "match_events");

  const auto zones = extend_reference(ref, params);

  MatchDetail detail;
  detail.ref.resize(ref.size());
  detail.hyp_overlaps_reference.assign(hyp.size(), false);

  for (std::size_t i = 0; i < zones.size(); ++i) {
    const auto& zone = zones[i];
    auto& match = detail.ref[i];
    for (std::size_t j = 0; j < hyp.size(); ++j) {
      const auto& h = hyp.events[j];
      const double overlap = overlap_length(zone.onset_s, zone.offset_s, h.onset_s, h.offset_s());
      if (overlap <= 0) continue;
      detail.hyp_overlaps_reference[j] = true;
      // min_overlap_s == 0 means any positive overlap is a detection; a
      // positive threshold must be strictly exceeded.
      if (overlap > params.min_overlap_s) {
        match.detected = true;
        match.hyp_indices.push_back(j);
      }
    }
  }

  Counts counts;
  counts.ref_total = static_cast<long>(ref.size());
  counts.hyp_total = static_cast<long>(hyp.size());
  counts.duration_s = ref.recording_duration_s;
  for (const auto& m : detail.ref) {
    if (m.detected) ++counts.tp;
  }
  counts.fn = counts.ref_total - counts.tp;
  for (bool overlaps : detail.hyp_overlaps_reference) {
    if (!overlaps) ++counts.fp;
  }
  return {counts, std::move(detail)};
}

Counts score_event_based(const EventList& ref, const EventList& hyp,
                         const ScoringParams& params) {
  const EventList reg_ref = ref.regularized ? ref : regularize(ref, params);
  const EventList reg_hyp = hyp.regularized ? hyp : regularize(hyp, params);
  return match_events(reg_ref, reg_hyp, params).first;
}

Counts score_sample_based(const EventList& ref, const EventList& hyp,
                          const ScoringParams& params) {
  require_same_recording(ref, hyp);
  if (!(params.sample_period_s > 0)) throw ContractError("sample period must be positive");
  const double duration = ref.recording_duration_s;
  if (!(duration > 0)) throw ContractError("recording duration must be positive");

  const auto n = static_cast<std::size_t>(std::ceil(duration / params.sample_period_s));

  const auto rasterize = [&](const EventList& list) {
    std::vector<bool> mask(n, false);
    for (const auto& e : list.events) {
      // Sample k covers [k*p, (k+1)*p); positive when the intersection with
      // the event has positive length.
      auto first = static_cast<std::ptrdiff_t>(std::floor(e.onset_s / params.sample_period_s));
      auto last = static_cast<std::ptrdiff_t>(std::ceil(e.offset_s() / params.sample_period_s));
      first = std::max<std::ptrdiff_t>(first, 0);
      last = std::min<std::ptrdiff_t>(last, static_cast<std::ptrdiff_t>(n));
      for (std::ptrdiff_t k = first; k < last; ++k) {
        const double lo = static_cast<double>(k) * params.sample_period_s;
        if (e.onset_s < lo + params.sample_period_s && e.offset_s() > lo) {
          mask[static_cast<std::size_t>(k)] = true;
        }
      }
    }
    return mask;
  };

  const auto ref_mask = rasterize(ref);
  const auto hyp_mask = rasterize(hyp);

  Counts counts;
  counts.duration_s = duration;
  for (std::size_t k = 0; k < n; ++k) {
    const bool r = ref_mask[k];
    const bool h = hyp_mask[k];
    if (r) ++counts.ref_total;
    if (h) ++counts.hyp_total;
    if (r && h) ++counts.tp;
    if (!r && h) ++counts.fp;
    if (r && !h) ++counts.fn;
  }
  return counts;
}

Metrics compute_metrics(const Counts& counts) {
  Metrics m;
  if (counts.tp + counts.fn > 0) {
    m.sensitivity = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  }
  if (counts.tp + counts.fp > 0) {
    m.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
  }
  if (m.sensitivity && m.precision && *m.sensitivity + *m.precision > 0) {
    m.f1 = 2.0 * *m.sensitivity * *m.precision / (*m.sensitivity + *m.precision);
  }
  if (counts.duration_s > 0) {
    m.fp_per_day = static_cast<double>(counts.fp) * 86400.0 / counts.duration_s;
  }
  return m;
}

}  // namespace szbench::scoring
