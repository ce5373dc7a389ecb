#pragma once

#include <cstddef>
#include <vector>

namespace szbench {

// One seizure interval, half-open [onset_s, onset_s + duration_s).
struct Event {
  double onset_s = 0.0;
  double duration_s = 0.0;

  double offset_s() const { return onset_s + duration_s; }

  friend bool operator==(const Event&, const Event&) = default;
};

// The events of one recording, sorted by onset. `regularized` is set once the
// list has been through scoring::regularize (short gaps merged, long events
// split) and is required by the matching stage.
struct EventList {
  double recording_duration_s = 0.0;
  std::vector<Event> events;
  bool regularized = false;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }

  friend bool operator==(const EventList&, const EventList&) = default;
};

bool is_sorted_by_onset(const EventList& list);
void sort_by_onset(EventList& list);

// Length of the intersection of two half-open intervals; <= 0 when disjoint.
double overlap_length(double a_on, double a_off, double b_on, double b_off);

}  // namespace szbench
