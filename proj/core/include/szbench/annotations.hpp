#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "szbench/events.hpp"

namespace szbench::annotations {

// Column set of the annotation TSV, pinned verbatim (tab-delimited).
inline constexpr const char* kTsvHeader =
    "onset\tduration\teventType\tconfidence\tchannels\tdateTime\trecordingDuration";

inline constexpr const char* kDefaultTask = "szMonitoring";

// Parses one annotation file. Rows whose eventType starts with "sz" become
// events; "bckg" and other rows are skipped. Events reaching past the
// recording end are clipped (a warning is recorded); events entirely outside
// the recording are dropped with a warning. A recordingDuration column that
// disagrees with `recording_duration_s` is reported as a warning and the
// caller-supplied duration wins.
EventList read_events_tsv(const std::filesystem::path& path, double recording_duration_s,
                          std::vector<std::string>* warnings = nullptr);

// Emits the pinned column set; optional fields are written as "n/a" and
// eventType as "sz". read_events_tsv(write_events_tsv(x)) == x.
void write_events_tsv(const EventList& list, const std::filesystem::path& path);

// One EEG recording of a dataset, paired with its reference annotation file
// when one exists next to it.
struct RecordingRef {
  std::string subject_id;
  std::string session_id;
  std::string run_id;
  std::string task;
  std::filesystem::path eeg_path;
  std::optional<std::filesystem::path> events_path;
  double duration_s = 0.0;

  std::string key() const;  // "sub-<s>/ses-<e>/run-<r>", unique within a dataset
  std::string events_filename() const;
  // Location of this recording's annotation file relative to the dataset
  // root; hypothesis trees mirror this layout.
  std::filesystem::path relative_events_path() const;
};

struct IndexFinding {
  std::filesystem::path path;
  std::string message;
};

struct DatasetIndex {
  std::filesystem::path root;
  std::string task;
  std::vector<RecordingRef> recordings;  // sorted by (subject, session, run)
  std::vector<IndexFinding> errors;      // per-file problems; indexing continues past them
};

// Walks root for sub-*/ses-*/eeg/sub-*_ses-*_task-<task>_run-*_eeg.edf.
// Files with an unreadable EDF header are recorded in `errors`. A duplicate
// (subject, session, run) triple throws IndexError.
DatasetIndex index_dataset(const std::filesystem::path& root,
                           const std::string& task = kDefaultTask);

enum class HypothesisStatus { found, missing, unparsable };
const char* to_string(HypothesisStatus status);

struct HypothesisFinding {
  std::string recording_key;
  HypothesisStatus status = HypothesisStatus::missing;
  std::string detail;
};

struct ValidationReport {
  std::vector<HypothesisFinding> entries;  // one per reference recording
  int n_found = 0;
  int n_missing = 0;
  int n_unparsable = 0;

  bool clean() const { return n_missing == 0 && n_unparsable == 0; }
};

// Checks a hypothesis tree against a reference index. Missing and unparsable
// hypothesis files are findings, not errors: downstream scoring treats both
// as "no seizures predicted".
ValidationReport validate_hypothesis_tree(const std::filesystem::path& hyp_root,
                                          const DatasetIndex& reference);

// Reference event lists keyed by RecordingRef::key(). A recording without an
// annotation file yields an empty list (background-only recording).
std::map<std::string, EventList> load_reference_events(const DatasetIndex& index);

// Hypothesis event lists for one algorithm tree, keyed like the reference.
// Missing or unparsable files yield empty lists.
std::map<std::string, EventList> load_hypothesis_events(const DatasetIndex& index,
                                                        const std::filesystem::path& hyp_root);

std::string subject_of_key(const std::string& recording_key);

}  // namespace szbench::annotations
