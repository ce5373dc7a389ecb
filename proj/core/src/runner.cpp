#include "szbench/runner.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "szbench/errors.hpp"
#include "szbench/strings.hpp"

namespace szbench::runner {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

std::string substitute(const std::string& tmpl, const std::string& key,
                       const std::string& value) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = tmpl.find(key, pos);
    if (hit == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      return out;
    }
    out.append(tmpl, pos, hit - pos);
    out += value;
    pos = hit + key.size();
  }
}

struct ChildResult {
  bool timed_out = false;
  bool signaled = false;
  int exit_code = 0;
  int signal_no = 0;
};

// Runs the command in its own process group so a timeout can kill the whole
// tree, not just the shell.
ChildResult run_child(const std::string& command, double timeout_s) {
  const pid_t pid = fork();
  if (pid < 0) throw IoError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);

  ChildResult result;
  int status = 0;
  while (true) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) throw IoError(std::string("waitpid failed: ") + std::strerror(errno));
    if (std::chrono::steady_clock::now() >= deadline) {
      result.timed_out = true;
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      return result;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }

  if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.signal_no = WTERMSIG(status);
  } else {
    result.exit_code = WEXITSTATUS(status);
  }
  return result;
}

}  // namespace

const char* to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::produced:
      return "produced";
    case RunOutcome::missing_output:
      return "missing_output";
    case RunOutcome::nonzero_exit:
      return "nonzero_exit";
    case RunOutcome::timeout:
      return "timeout";
    case RunOutcome::crashed:
      return "crashed";
  }
  return "unknown";
}

std::vector<RunRecord> run_dataset(const annotations::DatasetIndex& index,
                                   const RunnerConfig& cfg) {
  if (cfg.command_template.find("{input}") == std::string::npos ||
      cfg.command_template.find("{output}") == std::string::npos) {
    throw ContractError("command template must mention both {input} and {output}");
  }
  if (cfg.max_concurrency < 1) throw ContractError("max_concurrency must be >= 1");
  if (!(cfg.per_file_timeout_s > 0)) throw ContractError("timeout must be positive");
  if (cfg.workdir.empty()) throw ContractError("runner needs a work directory");
  fs::create_directories(cfg.workdir);

  const std::size_t n = index.recordings.size();
  std::vector<RunRecord> records(n);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> aborted{false};
  std::mutex failure_mutex;
  std::string first_failure;

  auto run_one = [&](std::size_t i) {
    const auto& rec = index.recordings[i];
    RunRecord& record = records[i];
    record.recording = rec;

    const fs::path final_path = cfg.workdir / rec.relative_events_path();
    fs::create_directories(final_path.parent_path());
    const fs::path temp_path =
        final_path.parent_path() /
        (".tmp-" + std::to_string(getpid()) + "-" + std::to_string(i) + "-" +
         final_path.filename().string());

    std::string command = substitute(cfg.command_template, "{input}",
                                     shell_quote(rec.eeg_path.string()));
    command = substitute(command, "{output}", shell_quote(temp_path.string()));

    const auto start = std::chrono::steady_clock::now();
    const ChildResult child = run_child(command, cfg.per_file_timeout_s);
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (child.timed_out) {
      record.outcome = RunOutcome::timeout;
      record.detail = "killed after " + format_seconds(cfg.per_file_timeout_s) + " s";
    } else if (child.signaled) {
      record.outcome = RunOutcome::crashed;
      record.detail = "killed by signal " + std::to_string(child.signal_no);
    } else if (child.exit_code != 0) {
      record.outcome = RunOutcome::nonzero_exit;
      record.detail = "exit code " + std::to_string(child.exit_code);
    } else if (!fs::is_regular_file(temp_path)) {
      record.outcome = RunOutcome::missing_output;
      record.detail = "detector wrote no output file";
    } else {
      try {
        annotations::read_events_tsv(temp_path, rec.duration_s);
        fs::rename(temp_path, final_path);
        record.outcome = RunOutcome::produced;
        record.output_path = final_path;
      } catch (const Error& e) {
        record.outcome = RunOutcome::missing_output;
        record.detail = std::string("output did not parse: ") + e.what();
      }
    }

    std::error_code ec;
    fs::remove(temp_path, ec);  // gone already when the rename happened

    if (record.outcome != RunOutcome::produced && !cfg.continue_on_error) {
      bool expected = false;
      if (aborted.compare_exchange_strong(expected, true)) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        first_failure = rec.key() + ": " + to_string(record.outcome) +
                        (record.detail.empty() ? "" : " (" + record.detail + ")");
      }
    }
  };

  auto worker = [&] {
    while (!aborted.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      run_one(i);
    }
  };

  const int threads = std::min<int>(cfg.max_concurrency, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (aborted.load()) {
    throw Error("run aborted at " + first_failure);
  }
  return records;
}

RunSummary summarize_run(const std::vector<RunRecord>& records) {
  RunSummary s;
  for (const auto& r : records) {
    switch (r.outcome) {
      case RunOutcome::produced:
        ++s.n_produced;
        break;
      case RunOutcome::missing_output:
        ++s.n_missing_output;
        break;
      case RunOutcome::nonzero_exit:
        ++s.n_nonzero_exit;
        break;
      case RunOutcome::timeout:
        ++s.n_timeout;
        break;
      case RunOutcome::crashed:
        ++s.n_crashed;
        break;
    }
    s.total_wall_s += r.wall_time_s;
    s.max_wall_s = std::max(s.max_wall_s, r.wall_time_s);
    if (r.outcome != RunOutcome::produced) {
      s.failures.push_back(r.recording.key() + ": " + to_string(r.outcome) +
                           (r.detail.empty() ? "" : " (" + r.detail + ")"));
    }
  }
  return s;
}

std::string summary_json(const RunSummary& summary, const std::vector<RunRecord>& records) {
  nlohmann::json root;
  root["total"] = summary.total();
  root["produced"] = summary.n_produced;
  root["missing_output"] = summary.n_missing_output;
  root["nonzero_exit"] = summary.n_nonzero_exit;
  root["timeout"] = summary.n_timeout;
  root["crashed"] = summary.n_crashed;
  root["total_wall_s"] = summary.total_wall_s;
  root["max_wall_s"] = summary.max_wall_s;

  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["recording"] = r.recording.key();
    j["outcome"] = to_string(r.outcome);
    j["wall_time_s"] = r.wall_time_s;
    j["output"] = r.output_path ? nlohmann::json(r.output_path->string()) : nlohmann::json(nullptr);
    j["detail"] = r.detail;
    recs.push_back(std::move(j));
  }
  root["records"] = std::move(recs);
  // Details quote external-detector output and paths, neither guaranteed to
  // be UTF-8; replace rather than throw.
  return root.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string summary_text(const RunSummary& summary) {
  std::string out = "ran " + std::to_string(summary.total()) + " recording(s): " +
                    std::to_string(summary.n_produced) + " produced, " +
                    std::to_string(summary.n_missing_output) + " missing output, " +
                    std::to_string(summary.n_nonzero_exit) + " nonzero exit, " +
                    std::to_string(summary.n_timeout) + " timed out, " +
                    std::to_string(summary.n_crashed) + " crashed\n";
  out += "wall time: " + format_seconds(summary.total_wall_s) + " s total, " +
         format_seconds(summary.max_wall_s) + " s slowest\n";
  for (const auto& f : summary.failures) out += f + "\n";
  return out;
}

}  // namespace szbench::runner
