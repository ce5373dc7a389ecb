#include "szbench/events.hpp"

#include <algorithm>

namespace szbench {

bool is_sorted_by_onset(const EventList& list) {
  return std::is_sorted(list.events.begin(), list.events.end(),
                        [](const Event& a, const Event& b) { return a.onset_s < b.onset_s; });
}

void sort_by_onset(EventList& list) {
  std::stable_sort(list.events.begin(), list.events.end(),
                   [](const Event& a, const Event& b) { return a.onset_s < b.onset_s; });
}

double overlap_length(double a_on, double a_off, double b_on, double b_off) {
  return std::min(a_off, b_off) - std::max(a_on, b_on);
}

}  // namespace szbench
