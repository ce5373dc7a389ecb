#include "szbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "szbench/errors.hpp"
#include "szbench/strings.hpp"

namespace szbench::report {

namespace {

using nlohmann::json;

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string md_field(const std::string& value) {
  std::string out;
  for (char c : value) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

// Percentage with `precision` decimals, or blank when the metric is undefined.
std::string pct(const std::optional<double>& v, int precision) {
  return v ? fixed(*v * 100.0, precision) : std::string();
}

std::string rate(const std::optional<double>& v, int precision) {
  return v ? fixed(*v, precision) : std::string();
}

// Shortest exact text for machine-readable columns; blank when undefined.
std::string exact(const std::optional<double>& v) {
  return v ? format_seconds(*v) : std::string();
}

json metric_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> metric_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string params_line(const scoring::ScoringParams& params) {
  return "# params: min_overlap=" + format_seconds(params.min_overlap_s) +
         "s preictal=" + format_seconds(params.preictal_tolerance_s) +
         "s postictal=" + format_seconds(params.postictal_tolerance_s) +
         "s merge_gap=" + format_seconds(params.merge_gap_s) +
         "s max_event=" + format_seconds(params.max_event_s) +
         "s sample_period=" + format_seconds(params.sample_period_s) + "s";
}

std::string leaderboard_csv(const std::vector<aggregate::LeaderboardEntry>& ranked,
                            const RenderOptions& opt) {
  std::ostringstream out;
  out << params_line(opt.params) << '\n';
  out << "rank,algorithm,f1_pct,sensitivity_pct,precision_pct,fp_per_day,n_subjects\n";
  int rank = 0;
  for (const auto& e : ranked) {
    const auto& m = e.dataset_score.mean_metrics;
    out << ++rank << ',' << csv_field(e.algorithm_name) << ',' << pct(m.f1, opt.precision) << ','
        << pct(m.sensitivity, opt.precision) << ',' << pct(m.precision, opt.precision) << ','
        << rate(m.fp_per_day, opt.precision) << ',' << e.dataset_score.per_subject.size() << '\n';
  }
  return out.str();
}

std::string leaderboard_markdown(const std::vector<aggregate::LeaderboardEntry>& ranked,
                                 const RenderOptions& opt) {
  std::ostringstream out;
  out << params_line(opt.params) << "\n\n";
  out << "| rank | algorithm | F1 (%) | sensitivity (%) | precision (%) | FP/day |\n";
  out << "|---:|---|---:|---:|---:|---:|\n";
  int rank = 0;
  for (const auto& e : ranked) {
    const auto& m = e.dataset_score.mean_metrics;
    out << "| " << ++rank << " | " << md_field(e.algorithm_name) << " | "
        << pct(m.f1, opt.precision) << " | " << pct(m.sensitivity, opt.precision) << " | "
        << pct(m.precision, opt.precision) << " | " << rate(m.fp_per_day, opt.precision)
        << " |\n";
  }
  return out.str();
}

std::string per_subject_csv(const std::vector<aggregate::LeaderboardEntry>& ranked,
                            const RenderOptions& opt) {
  std::ostringstream out;
  out << params_line(opt.params) << '\n';
  out << "algorithm,subject,tp,fp,fn,ref_events,hyp_events,duration_s,"
         "sensitivity,precision,f1,fp_per_day\n";
  for (const auto& e : ranked) {
    for (const auto& s : e.dataset_score.per_subject) {
      out << csv_field(e.algorithm_name) << ',' << csv_field(s.subject_id) << ',' << s.counts.tp
          << ',' << s.counts.fp << ',' << s.counts.fn << ',' << s.counts.ref_total << ','
          << s.counts.hyp_total << ',' << format_seconds(s.counts.duration_s) << ','
          << exact(s.metrics.sensitivity) << ',' << exact(s.metrics.precision) << ','
          << exact(s.metrics.f1) << ',' << exact(s.metrics.fp_per_day) << '\n';
    }
  }
  return out.str();
}

std::string scatter_csv(const std::vector<aggregate::LeaderboardEntry>& ranked,
                        const RenderOptions& opt) {
  std::ostringstream out;
  out << params_line(opt.params) << '\n';
  out << "algorithm,sensitivity,precision,f1\n";
  for (const auto& e : ranked) {
    const auto& m = e.dataset_score.mean_metrics;
    out << csv_field(e.algorithm_name) << ',' << exact(m.sensitivity) << ','
        << exact(m.precision) << ',' << exact(m.f1) << '\n';
  }
  return out.str();
}

std::string agreement_csv(const aggregate::AgreementReport& report, const RenderOptions& opt) {
  std::ostringstream out;
  out << params_line(opt.params) << '\n';
  out << "kind,recording,onset_s,offset_s,n_events,n_algorithms,fraction\n";
  for (const auto& e : report.events) {
    out << "ref_event," << csv_field(e.recording_key) << ',' << format_seconds(e.onset_s) << ','
        << format_seconds(e.onset_s + e.duration_s) << ",1," << e.n_detected << ','
        << format_seconds(e.fraction) << '\n';
  }
  for (const auto& c : report.fp_clusters) {
    out << "fp_cluster," << csv_field(c.recording_key) << ',' << format_seconds(c.span_onset_s)
        << ',' << format_seconds(c.span_offset_s) << ',' << c.n_events << ',' << c.n_algorithms
        << ',' << format_seconds(c.fraction) << '\n';
  }
  return out.str();
}

std::string scores_json(const std::vector<aggregate::LeaderboardEntry>& ranked,
                        const RenderOptions& opt) {
  json root;
  root["params"] = {{"min_overlap_s", opt.params.min_overlap_s},
                    {"preictal_tolerance_s", opt.params.preictal_tolerance_s},
                    {"postictal_tolerance_s", opt.params.postictal_tolerance_s},
                    {"merge_gap_s", opt.params.merge_gap_s},
                    {"max_event_s", opt.params.max_event_s},
                    {"sample_period_s", opt.params.sample_period_s}};

  json algos = json::array();
  for (const auto& e : ranked) {
    json a;
    a["name"] = e.algorithm_name;
    a["self_reported_f1"] = metric_json(e.self_reported_f1);
    const auto& m = e.dataset_score.mean_metrics;
    a["mean"] = {{"sensitivity", metric_json(m.sensitivity)},
                 {"precision", metric_json(m.precision)},
                 {"f1", metric_json(m.f1)},
                 {"fp_per_day", metric_json(m.fp_per_day)}};
    const auto& n = e.dataset_score.n_subjects_defined;
    a["support"] = {{"sensitivity", n.sensitivity},
                    {"precision", n.precision},
                    {"f1", n.f1},
                    {"fp_per_day", n.fp_per_day}};
    json subjects = json::array();
    for (const auto& s : e.dataset_score.per_subject) {
      subjects.push_back({{"id", s.subject_id},
                          {"tp", s.counts.tp},
                          {"fp", s.counts.fp},
                          {"fn", s.counts.fn},
                          {"ref_total", s.counts.ref_total},
                          {"hyp_total", s.counts.hyp_total},
                          {"duration_s", s.counts.duration_s}});
    }
    a["subjects"] = std::move(subjects);
    algos.push_back(std::move(a));
  }
  root["algorithms"] = std::move(algos);
  // Algorithm and subject names come from user flags and filenames; replace
  // non-UTF-8 bytes rather than throw.
  return root.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::vector<aggregate::LeaderboardEntry> scores_from_json(const std::string& text,
                                                          scoring::ScoringParams* params) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(e.what(), "scores json");
  }

  try {
    if (params) {
      const auto& p = root.at("params");
      params->min_overlap_s = p.at("min_overlap_s").get<double>();
      params->preictal_tolerance_s = p.at("preictal_tolerance_s").get<double>();
      params->postictal_tolerance_s = p.at("postictal_tolerance_s").get<double>();
      params->merge_gap_s = p.at("merge_gap_s").get<double>();
      params->max_event_s = p.at("max_event_s").get<double>();
      params->sample_period_s = p.at("sample_period_s").get<double>();
    }

    std::vector<aggregate::LeaderboardEntry> entries;
    for (const auto& a : root.at("algorithms")) {
      aggregate::LeaderboardEntry e;
      e.algorithm_name = a.at("name").get<std::string>();
      e.self_reported_f1 = metric_from_json(a.at("self_reported_f1"));
      const auto& m = a.at("mean");
      e.dataset_score.mean_metrics.sensitivity = metric_from_json(m.at("sensitivity"));
      e.dataset_score.mean_metrics.precision = metric_from_json(m.at("precision"));
      e.dataset_score.mean_metrics.f1 = metric_from_json(m.at("f1"));
      e.dataset_score.mean_metrics.fp_per_day = metric_from_json(m.at("fp_per_day"));
      const auto& n = a.at("support");
      e.dataset_score.n_subjects_defined.sensitivity = n.at("sensitivity").get<int>();
      e.dataset_score.n_subjects_defined.precision = n.at("precision").get<int>();
      e.dataset_score.n_subjects_defined.f1 = n.at("f1").get<int>();
      e.dataset_score.n_subjects_defined.fp_per_day = n.at("fp_per_day").get<int>();
      for (const auto& s : a.at("subjects")) {
        aggregate::SubjectScore subject;
        subject.subject_id = s.at("id").get<std::string>();
        subject.counts.tp = s.at("tp").get<long>();
        subject.counts.fp = s.at("fp").get<long>();
        subject.counts.fn = s.at("fn").get<long>();
        subject.counts.ref_total = s.at("ref_total").get<long>();
        subject.counts.hyp_total = s.at("hyp_total").get<long>();
        subject.counts.duration_s = s.at("duration_s").get<double>();
        subject.metrics = scoring::compute_metrics(subject.counts);
        e.dataset_score.per_subject.push_back(std::move(subject));
      }
      entries.push_back(std::move(e));
    }
    return entries;
  } catch (const json::exception& e) {
    throw ParseError(e.what(), "scores json");
  }
}

std::vector<SelfReportedRow> read_self_reported_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string source = path.string();

  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", source, -1, 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split(line, ',');
  int algo_col = -1;
  int f1_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = to_upper(std::string(trim(header[i])));
    if (name == "ALGORITHM") algo_col = static_cast<int>(i);
    if (name == "F1") f1_col = static_cast<int>(i);
  }
  if (algo_col < 0 || f1_col < 0) {
    throw ParseError("need 'algorithm' and 'f1' columns, got '" + line + "'", source, -1, 1);
  }

  std::vector<SelfReportedRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (static_cast<int>(fields.size()) <= std::max(algo_col, f1_col)) {
      throw ParseError("too few columns", source, -1, line_no);
    }
    SelfReportedRow row;
    row.algorithm = std::string(trim(fields[static_cast<std::size_t>(algo_col)]));
    if (row.algorithm.empty()) throw ParseError("empty algorithm name", source, -1, line_no);
    const std::string text = to_upper(std::string(trim(fields[static_cast<std::size_t>(f1_col)])));
    if (!text.empty() && text != "N/A" && text != "-") {
      const auto v = parse_double(text);
      if (!v || !(*v >= 0.0) || !(*v <= 1.0)) {
        throw ParseError("self-reported f1 must be a fraction in [0, 1], got '" + text + "'",
                         source, -1, line_no);
      }
      row.f1 = *v;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

struct ComparisonRow {
  std::string algorithm;
  std::optional<double> measured;
  std::optional<double> self_reported;
};

std::vector<ComparisonRow> comparison_rows(const std::vector<aggregate::LeaderboardEntry>& ranked,
                                           const std::vector<SelfReportedRow>& self_reported,
                                           std::vector<std::string>* warnings) {
  std::map<std::string, std::optional<double>> table;
  for (const auto& r : self_reported) table[r.algorithm] = r.f1;

  std::vector<ComparisonRow> rows;
  for (const auto& e : ranked) {
    ComparisonRow row;
    row.algorithm = e.algorithm_name;
    row.measured = e.dataset_score.mean_metrics.f1;
    if (const auto it = table.find(e.algorithm_name); it != table.end()) {
      row.self_reported = it->second;
      table.erase(it);
    } else {
      row.self_reported = e.self_reported_f1;
    }
    rows.push_back(std::move(row));
  }
  if (warnings) {
    for (const auto& [name, f1] : table) {
      warnings->push_back("self-reported row '" + name + "' matches no scored algorithm");
    }
  }
  return rows;
}

}  // namespace

std::string comparison_csv(const std::vector<aggregate::LeaderboardEntry>& ranked,
                           const std::vector<SelfReportedRow>& self_reported,
                           const RenderOptions& opt, std::vector<std::string>* warnings) {
  std::ostringstream out;
  out << params_line(opt.params) << '\n';
  out << "algorithm,measured_f1_pct,self_reported_f1_pct,delta_pct\n";
  for (const auto& row : comparison_rows(ranked, self_reported, warnings)) {
    out << csv_field(row.algorithm) << ',' << pct(row.measured, opt.precision) << ','
        << pct(row.self_reported, opt.precision) << ',';
    if (row.measured && row.self_reported) {
      out << fixed((*row.measured - *row.self_reported) * 100.0, opt.precision);
    }
    out << '\n';
  }
  return out.str();
}

std::string comparison_markdown(const std::vector<aggregate::LeaderboardEntry>& ranked,
                                const std::vector<SelfReportedRow>& self_reported,
                                const RenderOptions& opt, std::vector<std::string>* warnings) {
  std::ostringstream out;
  out << params_line(opt.params) << "\n\n";
  out << "| algorithm | measured F1 (%) | self-reported F1 (%) | delta (%) |\n";
  out << "|---|---:|---:|---:|\n";
  for (const auto& row : comparison_rows(ranked, self_reported, warnings)) {
    out << "| " << md_field(row.algorithm) << " | " << pct(row.measured, opt.precision) << " | "
        << pct(row.self_reported, opt.precision) << " | ";
    if (row.measured && row.self_reported) {
      out << fixed((*row.measured - *row.self_reported) * 100.0, opt.precision);
    }
    out << " |\n";
  }
  return out.str();
}

}  // namespace szbench::report
