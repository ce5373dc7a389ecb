#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "szbench/events.hpp"
#include "szbench/scoring.hpp"

namespace szbench::aggregate {

// Counts are summed across a subject's recordings first; metrics are computed
// once from the sums (not averaged per recording).
struct SubjectScore {
  std::string subject_id;
  scoring::Counts counts;
  scoring::Metrics metrics;
};

// How many subjects had each metric defined (and so entered its mean).
struct MetricSupport {
  int sensitivity = 0;
  int precision = 0;
  int f1 = 0;
  int fp_per_day = 0;
};

struct DatasetScore {
  std::vector<SubjectScore> per_subject;
  scoring::Metrics mean_metrics;  // arithmetic mean over subjects where defined
  MetricSupport n_subjects_defined;
};

struct LeaderboardEntry {
  std::string algorithm_name;
  DatasetScore dataset_score;
  std::optional<double> self_reported_f1;
};

enum class ScoringMode { event_based, sample_based };

// Scores each (reference, hypothesis) pair, sums the counts, then derives the
// subject metrics from the sums. Throws ContractError on an empty set.
SubjectScore score_subject(const std::string& subject_id,
                           const std::vector<std::pair<EventList, EventList>>& recordings,
                           const scoring::ScoringParams& params,
                           ScoringMode mode = ScoringMode::event_based);

// Arithmetic mean of each metric over the subjects where it is defined;
// undefined-for-all stays undefined. Throws ContractError on empty input.
DatasetScore score_dataset(std::vector<SubjectScore> subjects);

// Orders descending by mean event-based F1 (undefined last), ties by
// ascending FP/day then by name. Throws ContractError on duplicate names.
std::vector<LeaderboardEntry> rank(std::vector<LeaderboardEntry> entries);

// Scores one algorithm's hypothesis lists against the reference lists, both
// keyed by recording ("sub-x/ses-y/run-z"). Keys absent from `hyp` count as
// empty hypotheses. Recordings fan out over `jobs` threads.
DatasetScore score_recording_sets(const std::map<std::string, EventList>& ref,
                                  const std::map<std::string, EventList>& hyp,
                                  const scoring::ScoringParams& params,
                                  ScoringMode mode = ScoringMode::event_based,
                                  int jobs = 1);

struct AgreementReport {
  // One row per regularized reference event: the fraction of algorithms whose
  // matching detects it.
  struct EventAgreement {
    std::string recording_key;
    double onset_s = 0.0;
    double duration_s = 0.0;
    int n_detected = 0;
    double fraction = 0.0;
  };

  // False positives pooled across algorithms and clustered by transitive
  // positive overlap (no tolerances). Every FP lands in exactly one cluster.
  struct FpCluster {
    std::string recording_key;
    double span_onset_s = 0.0;
    double span_offset_s = 0.0;
    int n_events = 0;      // pooled FP events in the cluster
    int n_algorithms = 0;  // distinct algorithms contributing
    double fraction = 0.0; // n_algorithms / total algorithms
  };

  int n_algorithms = 0;
  std::vector<EventAgreement> events;
  std::vector<FpCluster> fp_clusters;
};

// Cross-algorithm detection agreement. Hypothesis sets are keyed like the
// reference; an algorithm lacking a recording contributes an empty list.
// Requires >= 2 algorithms.
AgreementReport agreement(
    const std::map<std::string, EventList>& ref_by_recording,
    const std::vector<std::pair<std::string, std::map<std::string, EventList>>>& hyps_by_algorithm,
    const scoring::ScoringParams& params);

}  // namespace szbench::aggregate
