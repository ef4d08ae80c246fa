#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "lasp/engine.hpp"
#include "lasp/scenario.hpp"

namespace lasp {

struct BenchCaseResult {
  std::string id;
  std::string task;
  int repetitions = 0;
  int successes = 0;
  double mean_events = 0.0;
  double mean_oracle_steps = 0.0;
  std::vector<std::string> failures;  // notes for non-success repetitions

  [[nodiscard]] double rate() const {
    return repetitions == 0 ? 0.0 : static_cast<double>(successes) / repetitions;
  }
};

struct BenchTaskAggregate {
  std::string task;
  int repetitions = 0;
  int successes = 0;

  [[nodiscard]] double rate() const {
    return repetitions == 0 ? 0.0 : static_cast<double>(successes) / repetitions;
  }
};

struct BenchReport {
  std::vector<BenchCaseResult> cases;
  std::vector<BenchTaskAggregate> per_task;
  std::chrono::milliseconds wall{0};  // console-only; kept out of report files
};

using BackendFactory = std::function<std::unique_ptr<ChatBackend>(const ScenarioBundle&)>;

/// Runs `repetitions` episodes per scenario, optionally spread over worker
/// threads (episodes share no mutable state). Individual episode failures
/// (including backend errors) are recorded in the report and never abort
/// the sweep; report assembly stays single-threaded and deterministic.
inline BenchReport bench(const std::vector<ScenarioBundle>& bundles,
                         const BackendFactory& backend_factory, const Budgets& budgets,
                         const ChatParams& chat, int repetitions,
                         ObservationMode mode = ObservationMode::Template, int workers = 1) {
  BenchReport report;
  auto started = std::chrono::steady_clock::now();

  struct Slot {
    bool success = false;
    std::size_t events = 0;
    std::size_t oracle_steps = 0;
    std::string failure;
  };
  const std::size_t jobs = bundles.size() * static_cast<std::size_t>(repetitions);
  std::vector<Slot> slots(jobs);
  std::atomic<std::size_t> next{0};
  auto run_jobs = [&] {
    for (std::size_t job = next.fetch_add(1); job < jobs; job = next.fetch_add(1)) {
      const ScenarioBundle& bundle = bundles[job / repetitions];
      Slot& slot = slots[job];
      try {
        std::unique_ptr<ChatBackend> backend = backend_factory(bundle);
        LaspEngine engine(bundle, *backend, budgets, chat, mode);
        EpisodeResult episode = engine.run_episode();
        slot.events = episode.events.size();
        slot.oracle_steps = episode.oracle_steps;
        if (episode.outcome == EpisodeResult::Outcome::Success) {
          slot.success = true;
        } else {
          slot.failure = std::string(episode.outcome_name()) +
                         (episode.note.empty() ? "" : ": " + episode.note);
        }
      } catch (const std::exception& e) {
        slot.failure = std::string("error: ") + e.what();
      }
    }
  };
  if (workers <= 1 || jobs <= 1) {
    run_jobs();
  } else {
    std::vector<std::thread> pool;
    int n = std::min<int>(workers, static_cast<int>(jobs));
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(run_jobs);
    for (auto& t : pool) t.join();
  }

  for (std::size_t b = 0; b < bundles.size(); ++b) {
    BenchCaseResult row;
    row.id = bundles[b].id;
    row.task = bundles[b].world.task_text;
    row.repetitions = repetitions;
    std::size_t total_events = 0;
    std::size_t total_steps = 0;
    for (int rep = 0; rep < repetitions; ++rep) {
      const Slot& slot = slots[b * repetitions + rep];
      total_events += slot.events;
      total_steps += slot.oracle_steps;
      if (slot.success) ++row.successes;
      else row.failures.push_back(slot.failure);
    }
    row.mean_events = repetitions == 0 ? 0.0 : static_cast<double>(total_events) / repetitions;
    row.mean_oracle_steps =
        repetitions == 0 ? 0.0 : static_cast<double>(total_steps) / repetitions;
    report.cases.push_back(std::move(row));
  }
  for (const auto& row : report.cases) {
    BenchTaskAggregate* agg = nullptr;
    for (auto& a : report.per_task)
      if (a.task == row.task) agg = &a;
    if (agg == nullptr) {
      report.per_task.push_back({row.task, 0, 0});
      agg = &report.per_task.back();
    }
    agg->repetitions += row.repetitions;
    agg->successes += row.successes;
  }
  report.wall = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  return report;
}

namespace detail {

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f%%", v * 100.0);
  return buf;
}

inline std::string row_label(const std::string& id) {
  if (id.rfind("case", 0) == 0 && id.size() > 4) return id.substr(4);
  return id;
}

}  // namespace detail

/// Aligned per-case results table.
/// Deterministic: wall time stays out so replay-backed runs are
/// byte-reproducible.
inline std::string render_report_text(const BenchReport& report) {
  std::ostringstream os;
  os << "Test case | Task           | Success rate | Mean events | Mean oracle steps\n";
  os << "----------+----------------+--------------+-------------+------------------\n";
  for (const auto& row : report.cases) {
    char line[160];
    std::snprintf(line, sizeof line, "%-9s | %-14s | %-12s | %-11s | %s\n",
                  detail::row_label(row.id).c_str(), row.task.substr(0, 14).c_str(),
                  detail::percent(row.rate()).c_str(), detail::fixed2(row.mean_events).c_str(),
                  detail::fixed2(row.mean_oracle_steps).c_str());
    os << line;
  }
  os << "\nPer-task aggregates\n";
  for (const auto& agg : report.per_task)
    os << "  " << agg.task << ": " << detail::percent(agg.rate()) << " (" << agg.successes << "/"
       << agg.repetitions << ")\n";
  return os.str();
}

inline nlohmann::json report_json(const BenchReport& report) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& row : report.cases) {
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : row.failures) failures.push_back(f);
    cases.push_back({{"id", row.id},
                     {"task", row.task},
                     {"repetitions", row.repetitions},
                     {"successes", row.successes},
                     {"rate", row.rate()},
                     {"mean_events", row.mean_events},
                     {"mean_oracle_steps", row.mean_oracle_steps},
                     {"failures", failures}});
  }
  nlohmann::json per_task = nlohmann::json::array();
  for (const auto& agg : report.per_task)
    per_task.push_back({{"task", agg.task},
                        {"repetitions", agg.repetitions},
                        {"successes", agg.successes},
                        {"rate", agg.rate()}});
  return {{"lasp_report_version", 1}, {"cases", cases}, {"per_task", per_task}};
}

}  // namespace lasp
