#include "szbench/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string_view>
#include <tuple>

#include "szbench/edf.hpp"
#include "szbench/errors.hpp"
#include "szbench/strings.hpp"

namespace szbench::annotations {

namespace {

constexpr const char* kNa = "n/a";

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings) warnings->push_back(std::move(message));
}

std::string line_prefix(long line) { return "line " + std::to_string(line) + ": "; }

// Annotation files may turn out to be arbitrary binary (a detector writing
// garbage); quoted content must stay printable and short.
std::string printable(std::string_view raw) {
  constexpr std::size_t kMaxQuoted = 80;
  std::string out;
  out.reserve(std::min(raw.size(), kMaxQuoted) + 3);
  for (char c : raw.substr(0, kMaxQuoted)) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(u < 32 || u > 126 ? '?' : c);
  }
  if (raw.size() > kMaxQuoted) out += "...";
  return out;
}

}  // namespace

EventList read_events_tsv(const std::filesystem::path& path, double recording_duration_s,
                          std::vector<std::string>* warnings) {
  if (!(recording_duration_s > 0)) {
    throw ContractError("recording duration must be positive when reading annotations");
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  const std::string source = path.string();
  std::string line;
  long line_no = 0;

  if (!std::getline(in, line)) {
    throw ParseError("empty annotation file (missing header row)", source, -1, 1);
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTsvHeader) {
    throw ParseError("unexpected header row '" + printable(line) + "'", source, -1, line_no);
  }

  EventList out;
  out.recording_duration_s = recording_duration_s;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    const auto fields = split(line, '\t');
    if (fields.size() != 7) {
      throw ParseError("expected 7 tab-separated fields, got " + std::to_string(fields.size()),
                       source, -1, line_no);
    }

    const std::string event_type{trim(fields[2])};

    const auto onset = parse_double(std::string(trim(fields[0])));
    if (!onset || !std::isfinite(*onset) || *onset < 0) {
      throw ParseError("bad onset '" + printable(fields[0]) + "'", source, -1, line_no);
    }
    const auto duration = parse_double(std::string(trim(fields[1])));
    if (!duration || !std::isfinite(*duration) || *duration < 0) {
      throw ParseError("bad duration '" + printable(fields[1]) + "'", source, -1, line_no);
    }

    const std::string rec_dur_text{trim(fields[6])};
    if (rec_dur_text != kNa && !rec_dur_text.empty()) {
      const auto stated = parse_double(rec_dur_text);
      if (!stated) {
        throw ParseError("bad recordingDuration '" + printable(rec_dur_text) + "'", source, -1,
                         line_no);
      }
      if (std::abs(*stated - recording_duration_s) > 1e-6) {
        warn(warnings, line_prefix(line_no) + "recordingDuration " + rec_dur_text +
                           " disagrees with the recording length " +
                           format_seconds(recording_duration_s));
      }
    }

    if (event_type.rfind("sz", 0) != 0) continue;  // bckg and other row types

    if (*duration == 0) {
      warn(warnings, line_prefix(line_no) + "zero-length event dropped");
      continue;
    }
    if (*onset >= recording_duration_s) {
      warn(warnings, line_prefix(line_no) + "event starts after the recording ends; dropped");
      continue;
    }
    Event e{*onset, *duration};
    if (e.offset_s() > recording_duration_s) {
      warn(warnings, line_prefix(line_no) + "event reaches past the recording end; clipped");
      e.duration_s = recording_duration_s - e.onset_s;
    }
    out.events.push_back(e);
  }

  sort_by_onset(out);
  return out;
}

void write_events_tsv(const EventList& list, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  out << kTsvHeader << '\n';
  const std::string rec_dur = format_seconds(list.recording_duration_s);
  for (const auto& e : list.events) {
    out << format_seconds(e.onset_s) << '\t' << format_seconds(e.duration_s) << "\tsz\t" << kNa
        << '\t' << kNa << '\t' << kNa << '\t' << rec_dur << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::string RecordingRef::key() const {
  return "sub-" + subject_id + "/ses-" + session_id + "/run-" + run_id;
}

std::string RecordingRef::events_filename() const {
  return "sub-" + subject_id + "_ses-" + session_id + "_task-" + task + "_run-" + run_id +
         "_events.tsv";
}

std::filesystem::path RecordingRef::relative_events_path() const {
  return std::filesystem::path("sub-" + subject_id) / ("ses-" + session_id) / "eeg" /
         events_filename();
}

DatasetIndex index_dataset(const std::filesystem::path& root, const std::string& task) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw IoError("dataset root " + root.string() + " is not a directory");
  }

  DatasetIndex index;
  index.root = root;
  index.task = task;

  for (const auto& sub_entry : fs::directory_iterator(root)) {
    if (!sub_entry.is_directory()) continue;
    const std::string sub_name = sub_entry.path().filename().string();
    if (sub_name.rfind("sub-", 0) != 0) continue;

    for (const auto& ses_entry : fs::directory_iterator(sub_entry.path())) {
      if (!ses_entry.is_directory()) continue;
      const std::string ses_name = ses_entry.path().filename().string();
      if (ses_name.rfind("ses-", 0) != 0) continue;

      const fs::path eeg_dir = ses_entry.path() / "eeg";
      if (!fs::is_directory(eeg_dir)) continue;

      for (const auto& file : fs::directory_iterator(eeg_dir)) {
        if (!file.is_regular_file() || file.path().extension() != ".edf") continue;

        const std::string stem = file.path().stem().string();
        const auto tokens = split(stem, '_');
        if (tokens.size() != 5 || tokens[4] != "eeg" || tokens[3].rfind("run-", 0) != 0 ||
            tokens[2].rfind("task-", 0) != 0) {
          index.errors.push_back({file.path(), "filename does not follow the "
                                               "sub-*_ses-*_task-*_run-*_eeg.edf pattern"});
          continue;
        }
        if (tokens[2].substr(5) != task) continue;  // another task; not this index's concern
        if (tokens[0] != sub_name || tokens[1] != ses_name) {
          index.errors.push_back(
              {file.path(), "filename subject/session disagrees with the directory"});
          continue;
        }
        const std::string run_id{tokens[3].substr(4)};
        if (run_id.empty()) {
          index.errors.push_back({file.path(), "empty run id"});
          continue;
        }

        RecordingRef rec;
        rec.subject_id = sub_name.substr(4);
        rec.session_id = ses_name.substr(4);
        rec.run_id = run_id;
        rec.task = task;
        rec.eeg_path = file.path();

        try {
          rec.duration_s = edf::recording_duration(edf::read_edf_header(file.path()));
        } catch (const Error& e) {
          // EDF errors already lead with the file path; store the bare message.
          std::string message = e.what();
          const std::string prefix = file.path().string() + ": ";
          if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
          index.errors.push_back({file.path(), std::move(message)});
          continue;
        }

        const fs::path events = eeg_dir / rec.events_filename();
        if (fs::is_regular_file(events)) rec.events_path = events;

        index.recordings.push_back(std::move(rec));
      }
    }
  }

  std::sort(index.recordings.begin(), index.recordings.end(),
            [](const RecordingRef& a, const RecordingRef& b) {
              return std::tie(a.subject_id, a.session_id, a.run_id) <
                     std::tie(b.subject_id, b.session_id, b.run_id);
            });
  for (std::size_t i = 1; i < index.recordings.size(); ++i) {
    if (index.recordings[i].key() == index.recordings[i - 1].key()) {
      throw IndexError("duplicate recording " + index.recordings[i].key() + " in " +
                       root.string());
    }
  }
  return index;
}

const char* to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::found:
      return "found";
    case HypothesisStatus::missing:
      return "missing";
    case HypothesisStatus::unparsable:
      return "unparsable";
  }
  return "unknown";
}

ValidationReport validate_hypothesis_tree(const std::filesystem::path& hyp_root,
                                          const DatasetIndex& reference) {
  ValidationReport report;
  for (const auto& rec : reference.recordings) {
    HypothesisFinding finding;
    finding.recording_key = rec.key();
    const auto path = hyp_root / rec.relative_events_path();
    if (!std::filesystem::is_regular_file(path)) {
      finding.status = HypothesisStatus::missing;
      finding.detail = "no file at " + path.string();
      ++report.n_missing;
    } else {
      try {
        read_events_tsv(path, rec.duration_s);
        finding.status = HypothesisStatus::found;
        ++report.n_found;
      } catch (const Error& e) {
        finding.status = HypothesisStatus::unparsable;
        finding.detail = e.what();
        ++report.n_unparsable;
      }
    }
    report.entries.push_back(std::move(finding));
  }
  return report;
}

std::map<std::string, EventList> load_reference_events(const DatasetIndex& index) {
  std::map<std::string, EventList> out;
  for (const auto& rec : index.recordings) {
    if (rec.events_path) {
      out[rec.key()] = read_events_tsv(*rec.events_path, rec.duration_s);
    } else {
      EventList empty;
      empty.recording_duration_s = rec.duration_s;
      out[rec.key()] = std::move(empty);
    }
  }
  return out;
}

std::map<std::string, EventList> load_hypothesis_events(const DatasetIndex& index,
                                                        const std::filesystem::path& hyp_root) {
  std::map<std::string, EventList> out;
  for (const auto& rec : index.recordings) {
    EventList list;
    list.recording_duration_s = rec.duration_s;
    const auto path = hyp_root / rec.relative_events_path();
    if (std::filesystem::is_regular_file(path)) {
      try {
        list = read_events_tsv(path, rec.duration_s);
      } catch (const Error&) {
        list.events.clear();  // unparsable predictions count as none at all
      }
    }
    out[rec.key()] = std::move(list);
  }
  return out;
}

std::string subject_of_key(const std::string& recording_key) {
  const auto slash = recording_key.find('/');
  return slash == std::string::npos ? recording_key : recording_key.substr(0, slash);
}

}  // namespace szbench::annotations
