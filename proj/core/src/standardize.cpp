#include "szbench/standardize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "szbench/errors.hpp"
#include "szbench/parallel.hpp"
#include "szbench/strings.hpp"

namespace szbench::standardize {

namespace fs = std::filesystem;

namespace {

// "EEG Fp1-REF" and friends all mean Fp1.
std::string normalize_label(const std::string& raw) {
  std::string s = to_upper(std::string(trim(raw)));
  if (s.rfind("EEG ", 0) == 0) s = s.substr(4);
  for (const char* suffix : {"-REF", "-LE", "-AVG", "-AR"}) {
    const std::string suf = suffix;
    if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0) {
      s = s.substr(0, s.size() - suf.size());
      break;
    }
  }
  return std::string(trim(s));
}

bool is_canonical(const std::string& label) {
  return std::find(kCanonicalChannels.begin(), kCanonicalChannels.end(), label) !=
         kCanonicalChannels.end();
}

// BIDS labels are plain alphanumerics.
std::string sanitize_bids_label(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

std::string two_digit_run(int n) {
  std::string s = std::to_string(n);
  return s.size() < 2 ? "0" + s : s;
}

struct PlannedConversion {
  fs::path source;
  fs::path events_source;  // empty when the recording has no annotation file
  std::string subject_id;
  std::string session_id;
  std::string run_id;
  std::string skip_reason;  // non-empty when the file cannot even be planned
};

// Reuses BIDS ids when the source already has them; otherwise the first
// directory under src names the subject, sessions default to 01 and runs
// count up in sorted source order.
void derive_ids(PlannedConversion& plan, const fs::path& src,
                std::map<std::pair<std::string, std::string>, int>& run_counters) {
  const fs::path rel = plan.source.lexically_relative(src);
  const auto stem = plan.source.stem().string();

  const auto tokens = split(stem, '_');
  const fs::path parent = plan.source.parent_path();
  if (tokens.size() == 5 && tokens[0].rfind("sub-", 0) == 0 && tokens[1].rfind("ses-", 0) == 0 &&
      tokens[2].rfind("task-", 0) == 0 && tokens[3].rfind("run-", 0) == 0 && tokens[4] == "eeg" &&
      parent.filename() == "eeg" && parent.parent_path().filename().string() == tokens[1] &&
      parent.parent_path().parent_path().filename().string() == tokens[0]) {
    plan.subject_id = tokens[0].substr(4);
    plan.session_id = tokens[1].substr(4);
    plan.run_id = tokens[3].substr(4);
    return;
  }

  std::string subject;
  if (rel.has_parent_path() && !rel.parent_path().empty() && rel.parent_path() != ".") {
    subject = sanitize_bids_label(rel.begin()->string());
  } else {
    subject = sanitize_bids_label(stem);
  }
  if (subject.empty()) subject = "unknown";

  plan.subject_id = subject;
  plan.session_id = "01";
  plan.run_id = two_digit_run(++run_counters[{plan.subject_id, plan.session_id}]);
}

fs::path find_events_sibling(const fs::path& edf_path) {
  const std::string stem = edf_path.stem().string();
  const fs::path dir = edf_path.parent_path();

  std::vector<std::string> candidates;
  if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, "_eeg") == 0) {
    candidates.push_back(stem.substr(0, stem.size() - 4) + "_events.tsv");
  }
  candidates.push_back(stem + "_events.tsv");
  candidates.push_back(stem + ".tsv");

  for (const auto& name : candidates) {
    const fs::path p = dir / name;
    if (fs::is_regular_file(p)) return p;
  }
  return {};
}

}  // namespace

ChannelMap::ChannelMap() {
  for (const char* c : kCanonicalChannels) aliases_[normalize_label(c)] = c;
  aliases_["T7"] = "T3";
  aliases_["T8"] = "T4";
  aliases_["P7"] = "T5";
  aliases_["P8"] = "T6";
}

void ChannelMap::add_alias(const std::string& raw_label, const std::string& canonical_label) {
  if (!is_canonical(canonical_label)) {
    throw ContractError("alias target '" + canonical_label + "' is not one of the 19 channels");
  }
  const std::string key = normalize_label(raw_label);
  if (key.empty()) throw ContractError("alias source label is empty after normalization");
  aliases_[key] = canonical_label;
}

std::optional<std::string> ChannelMap::resolve(const std::string& raw_label) const {
  const auto it = aliases_.find(normalize_label(raw_label));
  if (it == aliases_.end()) return std::nullopt;
  return it->second;
}

void load_config_file(const fs::path& path, StandardizeConfig& cfg, ChannelMap& map) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), path.string());
  }

  try {
    if (!j.is_object()) throw ParseError("config root must be a JSON object", path.string());
    for (const auto& [key, value] : j.items()) {
      if (key == "target_fs") {
        cfg.target_fs = value.get<double>();
        if (!(cfg.target_fs > 0)) throw ParseError("target_fs must be positive", path.string());
      } else if (key == "task") {
        cfg.task = value.get<std::string>();
      } else if (key == "jobs") {
        cfg.jobs = value.get<int>();
        if (cfg.jobs < 1) throw ParseError("jobs must be >= 1", path.string());
      } else if (key == "resampler") {
        for (const auto& [rk, rv] : value.items()) {
          if (rk == "kaiser_beta") {
            cfg.resampler.kaiser_beta = rv.get<double>();
          } else if (rk == "cutoff_ratio") {
            cfg.resampler.cutoff_ratio = rv.get<double>();
          } else if (rk == "zero_crossings") {
            cfg.resampler.zero_crossings = rv.get<int>();
          } else {
            throw ParseError("unknown resampler key '" + rk + "'", path.string());
          }
        }
      } else if (key == "aliases") {
        for (const auto& [raw, canonical] : value.items()) {
          map.add_alias(raw, canonical.get<std::string>());
        }
      } else {
        throw ParseError("unknown config key '" + key + "'", path.string());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), path.string());
  } catch (const ContractError& e) {
    throw ParseError(e.what(), path.string());
  }
}

edf::SignalMatrix map_channels(const edf::SignalMatrix& signals, const ChannelMap& map) {
  std::map<std::string, std::size_t> found;  // canonical -> input index
  for (std::size_t i = 0; i < signals.channel_count(); ++i) {
    const auto canonical = map.resolve(signals.channels[i]);
    if (!canonical) continue;
    const auto [it, inserted] = found.emplace(*canonical, i);
    if (!inserted) {
      throw StandardizeError("channels '" + signals.channels[it->second] + "' and '" +
                                 signals.channels[i] + "' both map to " + *canonical,
                             {});
    }
  }

  std::vector<std::string> missing;
  for (const char* c : kCanonicalChannels) {
    if (!found.count(c)) missing.push_back(c);
  }
  if (!missing.empty()) {
    std::string msg = "missing channels:";
    for (const auto& m : missing) msg += " " + m;
    throw StandardizeError(msg, missing);
  }

  edf::SignalMatrix out;
  out.duration_s = signals.duration_s;
  for (const char* c : kCanonicalChannels) {
    const std::size_t i = found.at(c);
    out.channels.emplace_back(c);
    out.fs_hz.push_back(signals.fs_hz[i]);
    out.samples.push_back(signals.samples[i]);
  }
  return out;
}

edf::SignalMatrix common_average(const edf::SignalMatrix& signals) {
  const std::size_t nc = signals.channel_count();
  if (nc < 2) throw ContractError("common average needs at least two channels");
  signals.common_fs();
  const std::size_t n = signals.samples[0].size();
  for (const auto& ch : signals.samples) {
    if (ch.size() != n) throw ContractError("channels differ in length");
  }

  edf::SignalMatrix out = signals;
  for (std::size_t t = 0; t < n; ++t) {
    double mean = 0.0;
    for (std::size_t c = 0; c < nc; ++c) mean += signals.samples[c][t];
    mean /= static_cast<double>(nc);
    for (std::size_t c = 0; c < nc; ++c) out.samples[c][t] -= mean;
  }
  return out;
}

edf::SignalMatrix resample(const edf::SignalMatrix& signals, double target_fs,
                           const dsp::ResamplerSpec& spec) {
  edf::SignalMatrix out;
  out.channels = signals.channels;
  out.duration_s = signals.duration_s;

  std::map<double, dsp::PolyphaseResampler> by_rate;
  for (std::size_t c = 0; c < signals.channel_count(); ++c) {
    const double fs = signals.fs_hz[c];
    auto it = by_rate.find(fs);
    if (it == by_rate.end()) {
      it = by_rate.emplace(fs, dsp::PolyphaseResampler(fs, target_fs, spec)).first;
    }
    out.fs_hz.push_back(target_fs);
    out.samples.push_back(it->second.process(signals.samples[c]));
  }
  return out;
}

ConversionReport standardize_dataset(const fs::path& src, const fs::path& dst,
                                     const StandardizeConfig& cfg, const ChannelMap& map) {
  if (!fs::is_directory(src)) throw IoError("source " + src.string() + " is not a directory");
  fs::create_directories(dst);

  const fs::path dst_canon = fs::weakly_canonical(dst);

  std::vector<fs::path> sources;
  for (const auto& entry : fs::recursive_directory_iterator(src)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".edf") continue;
    const auto canon = fs::weakly_canonical(entry.path());
    const auto rel_to_dst = canon.lexically_relative(dst_canon);
    if (!rel_to_dst.empty() && rel_to_dst.begin()->string() != "..") continue;  // prior output
    sources.push_back(entry.path());
  }
  std::sort(sources.begin(), sources.end());

  std::vector<PlannedConversion> plans(sources.size());
  std::map<std::pair<std::string, std::string>, int> run_counters;
  std::set<std::string> taken_keys;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    auto& plan = plans[i];
    plan.source = sources[i];
    plan.events_source = find_events_sibling(sources[i]);
    derive_ids(plan, src, run_counters);
    const std::string key = plan.subject_id + "/" + plan.session_id + "/" + plan.run_id;
    if (!taken_keys.insert(key).second) {
      plan.skip_reason = "output name sub-" + plan.subject_id + "/ses-" + plan.session_id +
                         "/run-" + plan.run_id + " already taken by another source file";
    }
  }

  ConversionReport report;
  report.entries.resize(plans.size());

  detail::parallel_for(plans.size(), cfg.jobs, [&](std::size_t i) {
    const auto& plan = plans[i];
    auto& outcome = report.entries[i];
    outcome.source = plan.source;

    if (!plan.skip_reason.empty()) {
      outcome.message = plan.skip_reason;
      return;
    }

    try {
      auto [header, matrix] = edf::read_edf(plan.source);
      const double source_duration = matrix.duration_s;

      auto canonical = resample(map_channels(matrix, map), cfg.target_fs, cfg.resampler);

      // Rounding can leave channels converted from different rates a sample
      // apart; trim to the shortest before referencing.
      std::size_t len = canonical.samples[0].size();
      for (const auto& ch : canonical.samples) len = std::min(len, ch.size());

      const auto spr = static_cast<std::size_t>(std::llround(cfg.target_fs));
      if (std::abs(cfg.target_fs - static_cast<double>(spr)) > 1e-9 || spr == 0) {
        throw ContractError("target rate must be a whole number of samples per second");
      }
      const std::size_t whole = (len / spr) * spr;
      if (whole == 0) throw ContractError("recording shorter than one second after conversion");
      for (auto& ch : canonical.samples) ch.resize(whole);
      canonical.duration_s = static_cast<double>(whole / spr);

      canonical = common_average(canonical);

      edf::EdfHeader out_header = edf::make_header(canonical, 1.0);
      out_header.start_day = header.start_day;
      out_header.start_month = header.start_month;
      out_header.start_year = header.start_year;
      out_header.start_hour = header.start_hour;
      out_header.start_minute = header.start_minute;
      out_header.start_second = header.start_second;

      annotations::RecordingRef ref;
      ref.subject_id = plan.subject_id;
      ref.session_id = plan.session_id;
      ref.run_id = plan.run_id;
      ref.task = cfg.task;

      const fs::path out_dir = dst / ("sub-" + plan.subject_id) / ("ses-" + plan.session_id) /
                               "eeg";
      fs::create_directories(out_dir);
      const fs::path out_edf =
          out_dir / ("sub-" + plan.subject_id + "_ses-" + plan.session_id + "_task-" + cfg.task +
                     "_run-" + plan.run_id + "_eeg.edf");
      edf::write_edf(out_header, canonical, out_edf);

      EventList events;
      events.recording_duration_s = canonical.duration_s;
      if (!plan.events_source.empty()) {
        EventList raw = annotations::read_events_tsv(plan.events_source, source_duration);
        for (auto e : raw.events) {
          if (e.onset_s >= canonical.duration_s) continue;
          e.duration_s = std::min(e.duration_s, canonical.duration_s - e.onset_s);
          events.events.push_back(e);
        }
      }
      annotations::write_events_tsv(events, out_dir / ref.events_filename());

      outcome.ok = true;
      outcome.output = out_edf;
      if (whole != len) {
        outcome.message = "dropped a partial trailing second (" + std::to_string(len - whole) +
                          " samples)";
      }
    } catch (const Error& e) {
      outcome.ok = false;
      outcome.message = e.what();
    }
  });

  for (const auto& e : report.entries) {
    if (e.ok) {
      ++report.n_ok;
    } else {
      ++report.n_failed;
    }
  }
  return report;
}

}  // namespace szbench::standardize
