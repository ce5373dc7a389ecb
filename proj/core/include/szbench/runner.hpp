#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "szbench/annotations.hpp"

namespace szbench::runner {

// Detector invocation contract: the template is run once per recording with
// {input} replaced by the EDF path and {output} by the TSV path the detector
// must write. Anything else at the output location is a failure.
struct RunnerConfig {
  std::string command_template;
  int max_concurrency = 1;
  double per_file_timeout_s = 3600.0;  // most recordings last about an hour
  std::filesystem::path workdir;       // hypothesis tree is assembled here
  bool continue_on_error = true;
};

enum class RunOutcome { produced, missing_output, nonzero_exit, timeout, crashed };
const char* to_string(RunOutcome outcome);

struct RunRecord {
  annotations::RecordingRef recording;
  RunOutcome outcome = RunOutcome::missing_output;
  double wall_time_s = 0.0;
  std::optional<std::filesystem::path> output_path;  // set iff outcome == produced
  std::string detail;
};

// Runs the detector over every recording of the index, at most
// max_concurrency invocations in flight. Each job writes to a unique temp
// path that is atomically renamed into the hypothesis tree once the output
// parses; a failing job can never corrupt another recording's output. Returns
// exactly one record per recording, in index order. With continue_on_error
// false the first failure aborts the run (in-flight jobs drain) and an Error
// carrying the failure is thrown.
std::vector<RunRecord> run_dataset(const annotations::DatasetIndex& index,
                                   const RunnerConfig& cfg);

struct RunSummary {
  long n_produced = 0;
  long n_missing_output = 0;
  long n_nonzero_exit = 0;
  long n_timeout = 0;
  long n_crashed = 0;
  double total_wall_s = 0.0;  // summed per-file wall time
  double max_wall_s = 0.0;
  std::vector<std::string> failures;  // "<recording>: <outcome> <detail>"

  long total() const {
    return n_produced + n_missing_output + n_nonzero_exit + n_timeout + n_crashed;
  }
  long failure_count() const { return total() - n_produced; }
};

RunSummary summarize_run(const std::vector<RunRecord>& records);
std::string summary_json(const RunSummary& summary, const std::vector<RunRecord>& records);
std::string summary_text(const RunSummary& summary);

}  // namespace szbench::runner
