#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "szbench/aggregate.hpp"
#include "szbench/annotations.hpp"
#include "szbench/baseline.hpp"
#include "szbench/edf.hpp"
#include "szbench/errors.hpp"
#include "szbench/parallel.hpp"
#include "szbench/report.hpp"
#include "szbench/runner.hpp"
#include "szbench/scoring.hpp"
#include "szbench/standardize.hpp"

namespace fs = std::filesystem;
using namespace szbench;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kFindings = 3;
constexpr int kInternal = 4;

struct NamedPath {
  std::string name;
  fs::path path;
};

// "NAME=PATH" or bare "PATH" (named after its filename).
NamedPath parse_named_path(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) {
    const fs::path p(arg);
    std::string name = p.filename().string();
    if (name.empty()) name = p.parent_path().filename().string();
    return {name.empty() ? arg : name, p};
  }
  NamedPath np{arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
  if (np.name.empty() || np.path.empty()) {
    throw CLI::ValidationError("--hypothesis", "expected NAME=PATH, got '" + arg + "'");
  }
  return np;
}

std::vector<NamedPath> parse_hypothesis_args(const std::vector<std::string>& args) {
  std::vector<NamedPath> out;
  for (const auto& a : args) out.push_back(parse_named_path(a));
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (out[i].name == out[j].name) {
        throw CLI::ValidationError("--hypothesis",
                                   "algorithm name '" + out[i].name + "' given twice");
      }
    }
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

// Recordings that failed to index never reach scoring or detection; surface
// them so a damaged dataset cannot silently shrink the benchmark.
long warn_index_errors(const annotations::DatasetIndex& index) {
  for (const auto& e : index.errors) {
    std::cerr << "warning: skipping " << e.path.string() << ": " << e.message << "\n";
  }
  return static_cast<long>(index.errors.size());
}

void add_params_flags(CLI::App* cmd, scoring::ScoringParams& params) {
  cmd->add_option("--min-overlap", params.min_overlap_s,
                  "Overlap (s) a detection must exceed; 0 accepts any positive overlap")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--preictal", params.preictal_tolerance_s,
                  "Tolerance (s) before a reference onset")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--postictal", params.postictal_tolerance_s,
                  "Tolerance (s) after a reference end")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--merge-gap", params.merge_gap_s,
                  "Merge events separated by less than this (s)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-event", params.max_event_s, "Split events longer than this (s)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sample-period", params.sample_period_s,
                  "Granularity (s) of sample-based scoring")
      ->check(CLI::PositiveNumber);
}

int cmd_validate(const fs::path& dataset, const std::vector<std::string>& hyp_args,
                 const std::string& task, const std::string& format) {
  const auto index = annotations::index_dataset(dataset, task);
  const auto hyps = parse_hypothesis_args(hyp_args);

  long findings = static_cast<long>(index.errors.size());
  nlohmann::json root;
  root["recordings"] = index.recordings.size();
  root["index_errors"] = nlohmann::json::array();
  for (const auto& e : index.errors) {
    root["index_errors"].push_back({{"path", e.path.string()}, {"message", e.message}});
  }

  nlohmann::json hyp_json = nlohmann::json::object();
  std::vector<std::string> lines;
  for (const auto& e : index.errors) {
    lines.push_back("index: " + e.path.string() + ": " + e.message);
  }
  for (const auto& [name, path] : hyps) {
    const auto report = annotations::validate_hypothesis_tree(path, index);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& entry : report.entries) {
      if (entry.status != annotations::HypothesisStatus::found) {
        ++findings;
        lines.push_back(name + ": " + entry.recording_key + ": " +
                        annotations::to_string(entry.status) +
                        (entry.detail.empty() ? "" : " (" + entry.detail + ")"));
      }
      entries.push_back({{"recording", entry.recording_key},
                         {"status", annotations::to_string(entry.status)},
                         {"detail", entry.detail}});
    }
    hyp_json[name] = {{"found", report.n_found},
                      {"missing", report.n_missing},
                      {"unparsable", report.n_unparsable},
                      {"entries", std::move(entries)}};
  }
  root["hypotheses"] = std::move(hyp_json);
  root["findings"] = findings;

  if (format == "json") {
    // Paths and finding messages may carry non-UTF-8 filename bytes.
    std::cout << root.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
  } else {
    for (const auto& line : lines) std::cout << line << "\n";
    std::cout << "indexed " << index.recordings.size() << " recording(s), " << findings
              << " finding(s)\n";
  }
  return findings == 0 ? kOk : kFindings;
}

int cmd_convert(const fs::path& src, const fs::path& out, const std::optional<fs::path>& config,
                std::optional<double> target_fs, std::optional<std::string> task, int jobs) {
  standardize::StandardizeConfig cfg;
  standardize::ChannelMap map;
  if (config) standardize::load_config_file(*config, cfg, map);
  if (target_fs) cfg.target_fs = *target_fs;
  if (task) cfg.task = *task;
  cfg.jobs = jobs;

  const auto report = standardize::standardize_dataset(src, out, cfg, map);
  for (const auto& e : report.entries) {
    if (e.ok) {
      std::cout << "ok " << e.source.string() << " -> " << e.output.string();
      if (!e.message.empty()) std::cout << " (" << e.message << ")";
      std::cout << "\n";
    } else {
      std::cout << "failed " << e.source.string() << ": " << e.message << "\n";
    }
  }
  std::cout << "converted " << report.n_ok << " of " << (report.n_ok + report.n_failed)
            << " recording(s)\n";
  return report.n_failed == 0 ? kOk : kFindings;
}

int cmd_detect(const fs::path& dataset, const fs::path& out, const std::string& task, int jobs,
               const baseline::BaselineConfig& cfg) {
  const auto index = annotations::index_dataset(dataset, task);
  const long n_skipped = warn_index_errors(index);
  fs::create_directories(out);

  std::vector<std::string> failures(index.recordings.size());
  detail::parallel_for(index.recordings.size(), jobs, [&](std::size_t i) {
    const auto& rec = index.recordings[i];
    try {
      edf::EdfReader reader(rec.eeg_path);
      const auto events = baseline::detect(reader.read_all(), cfg);
      const fs::path target = out / rec.relative_events_path();
      fs::create_directories(target.parent_path());
      annotations::write_events_tsv(events, target);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  long n_failed = 0;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      ++n_failed;
      std::cout << "failed " << index.recordings[i].key() << ": " << failures[i] << "\n";
    }
  }
  std::cout << "detected on " << (index.recordings.size() - static_cast<std::size_t>(n_failed))
            << " of " << index.recordings.size() << " recording(s)\n";
  return n_failed == 0 && n_skipped == 0 ? kOk : kFindings;
}

int cmd_score(const fs::path& dataset, const std::vector<std::string>& hyp_args,
              const fs::path& out, const std::string& task, const scoring::ScoringParams& params,
              const std::string& mode_name, int jobs, int precision,
              const std::string& format) {
  const auto hyps = parse_hypothesis_args(hyp_args);
  const auto mode = mode_name == "sample" ? aggregate::ScoringMode::sample_based
                                          : aggregate::ScoringMode::event_based;

  const auto index = annotations::index_dataset(dataset, task);
  const long n_skipped = warn_index_errors(index);
  if (index.recordings.empty()) {
    throw IoError("dataset " + dataset.string() + " contains no recordings for task " + task);
  }
  const auto ref = annotations::load_reference_events(index);

  std::vector<std::pair<std::string, std::map<std::string, EventList>>> hyp_events;
  std::vector<aggregate::LeaderboardEntry> entries;
  for (const auto& [name, path] : hyps) {
    hyp_events.emplace_back(name, annotations::load_hypothesis_events(index, path));
    aggregate::LeaderboardEntry e;
    e.algorithm_name = name;
    e.dataset_score =
        aggregate::score_recording_sets(ref, hyp_events.back().second, params, mode, jobs);
    entries.push_back(std::move(e));
  }
  const auto ranked = aggregate::rank(std::move(entries));

  const report::RenderOptions opt{precision, params};
  fs::create_directories(out);
  write_text_file(out / "leaderboard.csv", report::leaderboard_csv(ranked, opt));
  write_text_file(out / "leaderboard.md", report::leaderboard_markdown(ranked, opt));
  write_text_file(out / "per_subject.csv", report::per_subject_csv(ranked, opt));
  write_text_file(out / "scatter.csv", report::scatter_csv(ranked, opt));
  write_text_file(out / "scores.json", report::scores_json(ranked, opt));
  if (hyps.size() >= 2) {
    const auto agreement = aggregate::agreement(ref, hyp_events, params);
    write_text_file(out / "agreement.csv", report::agreement_csv(agreement, opt));
  }

  if (format == "csv") {
    std::cout << report::leaderboard_csv(ranked, opt);
  } else if (format == "json") {
    std::cout << report::scores_json(ranked, opt);
  } else if (format != "none") {
    std::cout << report::leaderboard_markdown(ranked, opt);
  }
  return n_skipped == 0 ? kOk : kFindings;
}

int cmd_run(const fs::path& dataset, const std::string& command, const fs::path& out,
            const std::string& task, int jobs, double timeout, bool keep_going) {
  if (command.find("{input}") == std::string::npos ||
      command.find("{output}") == std::string::npos) {
    std::cerr << "error: --command must mention both {input} and {output}\n";
    return kUsage;
  }
  const auto index = annotations::index_dataset(dataset, task);
  const long n_skipped = warn_index_errors(index);

  runner::RunnerConfig cfg;
  cfg.command_template = command;
  cfg.max_concurrency = jobs;
  cfg.per_file_timeout_s = timeout;
  cfg.workdir = out;
  cfg.continue_on_error = keep_going;

  std::vector<runner::RunRecord> records;
  try {
    records = runner::run_dataset(index, cfg);
  } catch (const ContractError&) {
    throw;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kFindings;
  }

  const auto summary = runner::summarize_run(records);
  fs::create_directories(out);
  write_text_file(out / "run_summary.json", runner::summary_json(summary, records));
  std::cout << runner::summary_text(summary);
  return summary.failure_count() == 0 && n_skipped == 0 ? kOk : kFindings;
}

int cmd_report(const fs::path& scores, const fs::path& out,
               const std::optional<fs::path>& self_reported, int precision) {
  std::ifstream in(scores);
  if (!in) throw IoError("cannot open " + scores.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  scoring::ScoringParams params;
  const auto ranked = report::scores_from_json(text, &params);
  const report::RenderOptions opt{precision, params};

  fs::create_directories(out);
  write_text_file(out / "leaderboard.md", report::leaderboard_markdown(ranked, opt));
  write_text_file(out / "leaderboard.csv", report::leaderboard_csv(ranked, opt));
  write_text_file(out / "scatter.csv", report::scatter_csv(ranked, opt));

  std::vector<std::string> warnings;
  if (self_reported) {
    const auto table = report::read_self_reported_csv(*self_reported);
    write_text_file(out / "comparison.csv", report::comparison_csv(ranked, table, opt, &warnings));
    write_text_file(out / "comparison.md",
                    report::comparison_markdown(ranked, table, opt, nullptr));
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  std::cout << report::leaderboard_markdown(ranked, opt);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seizure-detection benchmarking toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string task = annotations::kDefaultTask;
  int jobs = 1;
  int precision = 1;

  // validate
  auto* validate = app.add_subcommand("validate", "Check a dataset tree and hypothesis trees");
  fs::path v_dataset;
  std::vector<std::string> v_hyps;
  std::string v_format = "text";
  validate->add_option("--dataset", v_dataset, "Dataset root")->required();
  validate->add_option("--hypothesis", v_hyps, "Hypothesis tree, NAME=PATH or PATH (repeatable)");
  validate->add_option("--task", task, "BIDS task label");
  validate->add_option("--format", v_format, "Findings format")
      ->check(CLI::IsMember({"text", "json"}));

  // convert
  auto* convert = app.add_subcommand("convert", "Standardize recordings into a BIDS tree");
  fs::path c_src, c_out;
  std::optional<fs::path> c_config;
  std::optional<double> c_target_fs;
  std::optional<std::string> c_task;
  convert->add_option("--src", c_src, "Source directory with EDF files")->required();
  convert->add_option("--out", c_out, "Destination dataset root")->required();
  convert->add_option("--config", c_config, "JSON config (target_fs, resampler, aliases)");
  convert->add_option("--target-fs", c_target_fs, "Output sampling rate (Hz)");
  convert->add_option("--task", c_task, "BIDS task label for emitted files");
  convert->add_option("--jobs", jobs, "Parallel conversions")->check(CLI::PositiveNumber);

  // detect
  auto* detect = app.add_subcommand("detect", "Run the built-in band-power detector");
  fs::path d_dataset, d_out;
  baseline::BaselineConfig d_cfg;
  detect->add_option("--dataset", d_dataset, "Dataset root")->required();
  detect->add_option("--out", d_out, "Hypothesis tree to write")->required();
  detect->add_option("--task", task, "BIDS task label");
  detect->add_option("--jobs", jobs, "Parallel recordings")->check(CLI::PositiveNumber);
  detect->add_option("--window", d_cfg.window_s, "Analysis window (s)")
      ->check(CLI::PositiveNumber);
  detect->add_option("--band-low", d_cfg.band_low_hz, "Band-pass low edge (Hz)");
  detect->add_option("--band-high", d_cfg.band_high_hz, "Band-pass high edge (Hz)");
  detect->add_option("--notch", d_cfg.notch_hz, "Mains notch (Hz); 0 disables");
  detect->add_option("--threshold-k", d_cfg.threshold_k, "Threshold multiplier on the IQR")
      ->check(CLI::NonNegativeNumber);
  detect->add_option("--min-event", d_cfg.min_event_s, "Drop detections shorter than this (s)");

  // score
  auto* score = app.add_subcommand("score", "Score hypothesis trees against the reference");
  fs::path s_dataset, s_out = "scores";
  std::vector<std::string> s_hyps;
  scoring::ScoringParams s_params;
  std::string s_mode = "event";
  std::string s_format = "md";
  score->add_option("--dataset", s_dataset, "Dataset root with reference annotations")
      ->required();
  score->add_option("--hypothesis", s_hyps, "Hypothesis tree, NAME=PATH or PATH (repeatable)")
      ->required();
  score->add_option("--out", s_out, "Directory for the emitted artifacts");
  score->add_option("--task", task, "BIDS task label");
  score->add_option("--mode", s_mode, "Scoring semantics")
      ->check(CLI::IsMember({"event", "sample"}));
  score->add_option("--jobs", jobs, "Parallel recordings")->check(CLI::PositiveNumber);
  score->add_option("--precision", precision, "Decimals in rendered percentages")
      ->check(CLI::Range(0, 10));
  score->add_option("--format", s_format, "Stdout format")
      ->check(CLI::IsMember({"md", "csv", "json", "none"}));
  add_params_flags(score, s_params);

  // run
  auto* run = app.add_subcommand("run", "Run an external detector over a dataset");
  fs::path r_dataset, r_out;
  std::string r_command;
  double r_timeout = 3600.0;
  bool r_keep_going = true;
  run->add_option("--dataset", r_dataset, "Dataset root")->required();
  run->add_option("--command", r_command,
                  "Command template with {input} and {output} placeholders")
      ->required();
  run->add_option("--out", r_out, "Hypothesis tree the outputs are collected into")->required();
  run->add_option("--task", task, "BIDS task label");
  run->add_option("--jobs", jobs, "Detector processes in flight")->check(CLI::PositiveNumber);
  run->add_option("--timeout", r_timeout, "Per-recording timeout (s)")
      ->check(CLI::PositiveNumber);
  run->add_flag("--keep-going,!--no-keep-going", r_keep_going,
                "Continue past failing recordings (default on)");

  // report
  auto* report_cmd = app.add_subcommand("report", "Render reports from scores.json");
  fs::path p_scores, p_out = "report";
  std::optional<fs::path> p_self;
  report_cmd->add_option("--scores", p_scores, "scores.json from the score subcommand")
      ->required();
  report_cmd->add_option("--out", p_out, "Directory for rendered reports");
  report_cmd->add_option("--self-reported", p_self, "CSV with algorithm,f1 columns");
  report_cmd->add_option("--precision", precision, "Decimals in rendered percentages")
      ->check(CLI::Range(0, 10));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(v_dataset, v_hyps, task, v_format);
    if (*convert) return cmd_convert(c_src, c_out, c_config, c_target_fs, c_task, jobs);
    if (*detect) return cmd_detect(d_dataset, d_out, task, jobs, d_cfg);
    if (*score) {
      return cmd_score(s_dataset, s_hyps, s_out, task, s_params, s_mode, jobs, precision,
                       s_format);
    }
    if (*run) return cmd_run(r_dataset, r_command, r_out, task, jobs, r_timeout, r_keep_going);
    if (*report_cmd) return cmd_report(p_scores, p_out, p_self, precision);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFindings;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFindings;
  } catch (const IndexError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFindings;
  } catch (const StandardizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFindings;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
