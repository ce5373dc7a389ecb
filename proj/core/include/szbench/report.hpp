#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "szbench/aggregate.hpp"

namespace szbench::report {

struct RenderOptions {
  int precision = 1;  // decimals for rendered percentages and rates
  scoring::ScoringParams params;
};

// "# params: ..." comment echoed as the first line of every emitted report.
std::string params_line(const scoring::ScoringParams& params);

// Ranked leaderboard; `ranked` must come from aggregate::rank.
std::string leaderboard_csv(const std::vector<aggregate::LeaderboardEntry>& ranked,
                            const RenderOptions& opt);
std::string leaderboard_markdown(const std::vector<aggregate::LeaderboardEntry>& ranked,
                                 const RenderOptions& opt);

std::string per_subject_csv(const std::vector<aggregate::LeaderboardEntry>& ranked,
                            const RenderOptions& opt);

// Sensitivity/precision/F1 triples per algorithm, ready for iso-F1 plots.
std::string scatter_csv(const std::vector<aggregate::LeaderboardEntry>& ranked,
                        const RenderOptions& opt);

std::string agreement_csv(const aggregate::AgreementReport& report, const RenderOptions& opt);

// Structured report (JSON): params, per-algorithm means, support counts and
// per-subject breakdown. scores_from_json restores what cmd_report consumes.
std::string scores_json(const std::vector<aggregate::LeaderboardEntry>& ranked,
                        const RenderOptions& opt);
std::vector<aggregate::LeaderboardEntry> scores_from_json(const std::string& text,
                                                          scoring::ScoringParams* params = nullptr);

struct SelfReportedRow {
  std::string algorithm;
  std::optional<double> f1;  // fraction in [0, 1]
};

// CSV with an "algorithm" and an "f1" column; empty, "n/a" or "-" mean
// unknown.
std::vector<SelfReportedRow> read_self_reported_csv(const std::filesystem::path& path);

// Measured versus self-reported F1, one row per ranked algorithm. Rows of the
// self-reported table matching no algorithm are skipped with a warning.
std::string comparison_csv(const std::vector<aggregate::LeaderboardEntry>& ranked,
                           const std::vector<SelfReportedRow>& self_reported,
                           const RenderOptions& opt,
                           std::vector<std::string>* warnings = nullptr);
std::string comparison_markdown(const std::vector<aggregate::LeaderboardEntry>& ranked,
                                const std::vector<SelfReportedRow>& self_reported,
                                const RenderOptions& opt,
                                std::vector<std::string>* warnings = nullptr);

}  // namespace szbench::report
