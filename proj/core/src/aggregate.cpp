#include "szbench/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "szbench/annotations.hpp"
#include "szbench/errors.hpp"
#include "szbench/parallel.hpp"

namespace szbench::aggregate {

namespace {

scoring::Counts score_pair(const EventList& ref, const EventList& hyp,
                           const scoring::ScoringParams& params, ScoringMode mode) {
  return mode == ScoringMode::event_based ? scoring::score_event_based(ref, hyp, params)
                                          : scoring::score_sample_based(ref, hyp, params);
}

}  // namespace

SubjectScore score_subject(const std::string& subject_id,
                           const std::vector<std::pair<EventList, EventList>>& recordings,
                           const scoring::ScoringParams& params, ScoringMode mode) {
  if (recordings.empty()) {
    throw ContractError("subject " + subject_id + " has no recordings to score");
  }
  SubjectScore score;
  score.subject_id = subject_id;
  for (const auto& [ref, hyp] : recordings) {
    score.counts = score.counts + score_pair(ref, hyp, params, mode);
  }
  score.metrics = scoring::compute_metrics(score.counts);
  return score;
}

DatasetScore score_dataset(std::vector<SubjectScore> subjects) {
  if (subjects.empty()) throw ContractError("no subjects to aggregate");
  std::sort(subjects.begin(), subjects.end(),
            [](const SubjectScore& a, const SubjectScore& b) {
              return a.subject_id < b.subject_id;
            });

  DatasetScore out;
  out.per_subject = std::move(subjects);

  const auto mean_of = [&](auto metric_member, int& support) -> std::optional<double> {
    double sum = 0.0;
    int n = 0;
    for (const auto& s : out.per_subject) {
      if (const auto& v = s.metrics.*metric_member) {
        sum += *v;
        ++n;
      }
    }
    support = n;
    if (n == 0) return std::nullopt;
    return sum / n;
  };

  out.mean_metrics.sensitivity =
      mean_of(&scoring::Metrics::sensitivity, out.n_subjects_defined.sensitivity);
  out.mean_metrics.precision =
      mean_of(&scoring::Metrics::precision, out.n_subjects_defined.precision);
  out.mean_metrics.f1 = mean_of(&scoring::Metrics::f1, out.n_subjects_defined.f1);
  out.mean_metrics.fp_per_day =
      mean_of(&scoring::Metrics::fp_per_day, out.n_subjects_defined.fp_per_day);
  return out;
}

std::vector<LeaderboardEntry> rank(std::vector<LeaderboardEntry> entries) {
  std::set<std::string> names;
  for (const auto& e : entries) {
    if (!names.insert(e.algorithm_name).second) {
      throw ContractError("duplicate algorithm name '" + e.algorithm_name + "'");
    }
  }

  constexpr double kUndefinedF1 = -std::numeric_limits<double>::infinity();
  constexpr double kUndefinedFpDay = std::numeric_limits<double>::infinity();
  std::sort(entries.begin(), entries.end(),
            [&](const LeaderboardEntry& a, const LeaderboardEntry& b) {
              const double fa = a.dataset_score.mean_metrics.f1.value_or(kUndefinedF1);
              const double fb = b.dataset_score.mean_metrics.f1.value_or(kUndefinedF1);
              if (fa != fb) return fa > fb;
              const double da = a.dataset_score.mean_metrics.fp_per_day.value_or(kUndefinedFpDay);
              const double db = b.dataset_score.mean_metrics.fp_per_day.value_or(kUndefinedFpDay);
              if (da != db) return da < db;
              return a.algorithm_name < b.algorithm_name;
            });
  return entries;
}

DatasetScore score_recording_sets(const std::map<std::string, EventList>& ref,
                                  const std::map<std::string, EventList>& hyp,
                                  const scoring::ScoringParams& params, ScoringMode mode,
                                  int jobs) {
  if (ref.empty()) throw ContractError("no reference recordings to score");

  std::vector<const std::pair<const std::string, EventList>*> items;
  items.reserve(ref.size());
  for (const auto& kv : ref) items.push_back(&kv);

  std::vector<scoring::Counts> counts(items.size());
  detail::parallel_for(items.size(), jobs, [&](std::size_t i) {
    const auto& [key, ref_list] = *items[i];
    const auto it = hyp.find(key);
    if (it != hyp.end()) {
      counts[i] = score_pair(ref_list, it->second, params, mode);
    } else {
      EventList empty;
      empty.recording_duration_s = ref_list.recording_duration_s;
      counts[i] = score_pair(ref_list, empty, params, mode);
    }
  });

  std::map<std::string, scoring::Counts> by_subject;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string subject = annotations::subject_of_key(items[i]->first);
    by_subject[subject] = by_subject[subject] + counts[i];
  }

  std::vector<SubjectScore> subjects;
  for (const auto& [subject, c] : by_subject) {
    SubjectScore s;
    s.subject_id = subject;
    s.counts = c;
    s.metrics = scoring::compute_metrics(c);
    subjects.push_back(std::move(s));
  }
  return score_dataset(std::move(subjects));
}

AgreementReport agreement(
    const std::map<std::string, EventList>& ref_by_recording,
    const std::vector<std::pair<std::string, std::map<std::string, EventList>>>& hyps_by_algorithm,
    const scoring::ScoringParams& params) {
  const int n_algos = static_cast<int>(hyps_by_algorithm.size());
  if (n_algos < 2) throw ContractError("agreement analysis needs at least two algorithms");

  AgreementReport report;
  report.n_algorithms = n_algos;

  struct PooledFp {
    Event event;
    int algorithm = 0;
  };

  for (const auto& [key, raw_ref] : ref_by_recording) {
    const EventList reg_ref = scoring::regularize(raw_ref, params);

    std::vector<int> detected_by(reg_ref.size(), 0);
    std::vector<PooledFp> pooled;

    for (int a = 0; a < n_algos; ++a) {
      const auto& hyp_map = hyps_by_algorithm[static_cast<std::size_t>(a)].second;
      EventList hyp;
      hyp.recording_duration_s = raw_ref.recording_duration_s;
      if (const auto it = hyp_map.find(key); it != hyp_map.end()) hyp = it->second;
      const EventList reg_hyp = scoring::regularize(hyp, params);

      const auto [counts, detail] = scoring::match_events(reg_ref, reg_hyp, params);
      (void)counts;
      for (std::size_t i = 0; i < detail.ref.size(); ++i) {
        if (detail.ref[i].detected) ++detected_by[i];
      }
      for (std::size_t j = 0; j < detail.hyp_overlaps_reference.size(); ++j) {
        if (!detail.hyp_overlaps_reference[j]) pooled.push_back({reg_hyp.events[j], a});
      }
    }

    for (std::size_t i = 0; i < reg_ref.size(); ++i) {
      report.events.push_back({key, reg_ref.events[i].onset_s, reg_ref.events[i].duration_s,
                               detected_by[i],
                               static_cast<double>(detected_by[i]) / n_algos});
    }

    // Cluster the pooled FPs by transitive positive overlap.
    std::sort(pooled.begin(), pooled.end(), [](const PooledFp& a, const PooledFp& b) {
      return a.event.onset_s < b.event.onset_s;
    });
    std::size_t i = 0;
    while (i < pooled.size()) {
      double span_on = pooled[i].event.onset_s;
      double span_off = pooled[i].event.offset_s();
      std::set<int> algos{pooled[i].algorithm};
      std::size_t j = i + 1;
      while (j < pooled.size() && pooled[j].event.onset_s < span_off) {
        span_off = std::max(span_off, pooled[j].event.offset_s());
        algos.insert(pooled[j].algorithm);
        ++j;
      }
      report.fp_clusters.push_back({key, span_on, span_off, static_cast<int>(j - i),
                                    static_cast<int>(algos.size()),
                                    static_cast<double>(algos.size()) / n_algos});
      i = j;
    }
  }
  return report;
}

}  // namespace szbench::aggregate
