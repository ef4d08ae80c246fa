// lasp: load scenario bundles, run single repair episodes or the full
// benchmark, validate bundles, and record/replay LLM transcripts.
//
// Exit codes: 0 success, 1 episode exhausted or out of budget,
// 2 validation failure, 3 backend failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "lasp/bench.hpp"
#include "lasp/engine.hpp"
#include "lasp/live_backend.hpp"
#include "lasp/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitEpisodeFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBackend = 3;

struct CommonOptions {
  std::string backend = "scripted";
  std::string script_path;
  std::string transcript_path;
  std::string record_path;
  std::string endpoint;
  std::string model = "gpt-4";
  std::string key_file;
  double temperature = 0.0;
  std::int64_t seed = -1;
  int timeout_seconds = 60;
  std::string observation = "template";
  std::string heuristic = "blind";
  int max_depth = 3;
  int max_reasons = 7;
  int max_replans = 2;
  std::uint64_t planner_nodes = 1'000'000;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->fallthrough();
  cmd->add_option("--backend", opts.backend, "Backend: scripted | replay | live")
      ->check(CLI::IsMember({"scripted", "replay", "live"}));
  cmd->add_option("--script", opts.script_path, "Reply script (default: <scenario>/script.json)");
  cmd->add_option("--transcript", opts.transcript_path, "Transcript to replay");
  cmd->add_option("--record", opts.record_path, "Record all exchanges to this transcript");
  cmd->add_option("--endpoint", opts.endpoint, "Chat-completions base URL for the live backend");
  cmd->add_option("--model", opts.model, "Model id for live requests");
  cmd->add_option("--key-file", opts.key_file, "File holding the API key");
  cmd->add_option("--temperature", opts.temperature, "Sampling temperature (live)");
  cmd->add_option("--seed", opts.seed, "Sampling seed (live; -1 = unset)");
  cmd->add_option("--timeout", opts.timeout_seconds, "Request timeout in seconds (live)");
  cmd->add_option("--observation", opts.observation, "Observation mode: template | paraphrase")
      ->check(CLI::IsMember({"template", "paraphrase"}));
  cmd->add_option("--heuristic", opts.heuristic, "Planner heuristic: blind | additive")
      ->check(CLI::IsMember({"blind", "additive"}));
  cmd->add_option("--max-depth", opts.max_depth, "Max refinement recursion depth");
  cmd->add_option("--max-reasons", opts.max_reasons, "Max reasons explored per error");
  cmd->add_option("--max-replans", opts.max_replans, "Max replans per reason");
  cmd->add_option("--planner-nodes", opts.planner_nodes, "Planner expansion cap");
}

std::string api_key(const CommonOptions& opts) {
  // Keys come from the environment or a key file only, never from a flag.
  if (const char* key = std::getenv("LASP_API_KEY")) return key;
  if (const char* key = std::getenv("OPENAI_API_KEY")) return key;
  if (!opts.key_file.empty()) {
    std::ifstream in(opts.key_file);
    std::string key;
    std::getline(in, key);
    return key;
  }
  return "";
}

lasp::Budgets budgets_of(const CommonOptions& opts) {
  lasp::Budgets budgets;
  budgets.max_recursion_depth = opts.max_depth;
  budgets.max_reasons_per_error = opts.max_reasons;
  budgets.max_replans_per_reason = opts.max_replans;
  budgets.planner.max_expansions = opts.planner_nodes;
  budgets.heuristic =
      opts.heuristic == "additive" ? lasp::Heuristic::Additive : lasp::Heuristic::Blind;
  return budgets;
}

lasp::ChatParams chat_of(const CommonOptions& opts) {
  lasp::ChatParams chat;
  chat.model = opts.model;
  chat.temperature = opts.temperature;
  if (opts.seed >= 0) chat.seed = opts.seed;
  return chat;
}

std::unique_ptr<lasp::ChatBackend> make_backend(const CommonOptions& opts,
                                                const fs::path& scenario) {
  if (opts.backend == "scripted") {
    std::string path =
        opts.script_path.empty() ? (scenario / "script.json").string() : opts.script_path;
    return std::make_unique<lasp::ScriptedBackend>(lasp::ScriptedBackend::from_file(path));
  }
  if (opts.backend == "replay") {
    std::string path = opts.transcript_path.empty() ? (scenario / "transcript.jsonl").string()
                                                    : opts.transcript_path;
    return std::make_unique<lasp::ReplayBackend>(lasp::ReplayBackend::from_file(path));
  }
  lasp::LiveConfig config;
  config.base_url = opts.endpoint;
  if (config.base_url.empty()) {
    if (const char* url = std::getenv("LASP_LIVE_BASE_URL")) config.base_url = url;
  }
  if (config.base_url.empty())
    throw lasp::BackendError(lasp::BackendError::Kind::Transport,
                             "live backend needs --endpoint or LASP_LIVE_BASE_URL");
  config.api_key = api_key(opts);
  config.model = opts.model;
  config.temperature = opts.temperature;
  if (opts.seed >= 0) config.seed = opts.seed;
  config.timeout_seconds = opts.timeout_seconds;
  return std::make_unique<lasp::LiveBackend>(config);
}

int run_episode_command(const std::string& scenario_path, const CommonOptions& opts,
                        const std::string& out_dir) {
  lasp::ScenarioBundle bundle = lasp::load_bundle(scenario_path);
  std::vector<std::string> errors = lasp::validate_bundle(bundle);
  if (!errors.empty()) {
    std::cerr << "bundle validation failed:\n";
    for (const auto& e : errors) std::cerr << "  - " << e << "\n";
    return kExitValidation;
  }

  std::unique_ptr<lasp::ChatBackend> backend;
  try {
    backend = make_backend(opts, bundle.path);
  } catch (const lasp::BackendError& e) {
    std::cerr << "backend setup failed: " << e.what() << "\n";
    return kExitBackend;
  }
  lasp::RecordingBackend recorder(std::move(backend), bundle.id);

  lasp::ObservationMode mode = opts.observation == "paraphrase"
                                   ? lasp::ObservationMode::Paraphrase
                                   : lasp::ObservationMode::Template;
  auto save_transcript = [&recorder, &opts] {
    if (opts.record_path.empty()) return;
    lasp::Transcript transcript = recorder.transcript();
    transcript.save(opts.record_path);
    std::cout << "transcript written to " << opts.record_path << "\n";
  };
  lasp::LaspEngine engine(bundle, recorder, budgets_of(opts), chat_of(opts), mode);
  lasp::EpisodeResult result;
  try {
    result = engine.run_episode();
  } catch (const lasp::BackendError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    save_transcript();  // keep the partial recording
    return kExitBackend;
  }

  std::cout << "outcome: " << result.outcome_name() << "\n";
  std::cout << "events: " << result.events.size() << ", oracle steps: " << result.oracle_steps
            << ", replans: " << result.replans << ", max depth: " << result.max_depth_reached
            << "\n";
  for (const auto& event : result.events) {
    std::cout << "  " << event.kind_name();
    if (!event.conjunct.empty()) std::cout << " " << event.schema << " += " << event.conjunct;
    if (!event.property.empty()) std::cout << " " << event.property << " <- " << event.env_property;
    if (!event.object.empty()) std::cout << " " << event.object;
    std::cout << "\n";
  }
  if (result.outcome == lasp::EpisodeResult::Outcome::Success) {
    std::cout << "final plan:\n";
    for (const auto& step : result.final_plan.steps) std::cout << "  " << step.str() << "\n";
  } else if (!result.note.empty()) {
    std::cout << "note: " << result.note << "\n";
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "episode.jsonl") << lasp::event_log_jsonl(bundle.id, result);
    std::ofstream plan_out(fs::path(out_dir) / "plan.txt");
    for (const auto& step : result.final_plan.steps) plan_out << step.str() << "\n";
  }
  save_transcript();
  return result.outcome == lasp::EpisodeResult::Outcome::Success ? kExitSuccess
                                                                 : kExitEpisodeFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LASP: symbolic planning with LLM-driven model repair"};
  app.require_subcommand(1);
  // INI config file with one section per subcommand (e.g. [bench]);
  // flags given on the command line take precedence
  app.set_config("--config", "", "Read options from a config file");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one repair episode on a scenario bundle");
  std::string scenario_path;
  std::string out_dir;
  CommonOptions run_opts;
  run_cmd->add_option("--scenario", scenario_path, "Scenario bundle directory")->required();
  run_cmd->add_option("--out", out_dir, "Directory for episode.jsonl and plan.txt");
  add_common_options(run_cmd, run_opts);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run repeated episodes over many scenarios");
  std::string scenarios_root = "scenarios";
  std::vector<std::string> case_ids;
  std::string report_path;
  int repetitions = 5;
  int workers = 1;
  CommonOptions bench_opts;
  bench_cmd->add_option("--scenarios", scenarios_root, "Directory holding the bundles");
  bench_cmd->add_option("--case", case_ids, "Bundle ids to run (default: case1..case9)");
  bench_cmd->add_option("--reps", repetitions, "Episodes per case")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--report", report_path, "Write <report>.txt and <report>.json");
  bench_cmd->add_option("--workers", workers, "Concurrent episodes");
  add_common_options(bench_cmd, bench_opts);

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check one scenario bundle");
  std::string validate_path;
  validate_cmd->add_option("--scenario", validate_path, "Scenario bundle directory")->required();

  // record
  auto* record_cmd = app.add_subcommand("record", "Run live and write the transcript");
  std::string record_scenario;
  std::string record_out = "transcript.jsonl";
  CommonOptions record_opts;
  record_cmd->add_option("--scenario", record_scenario, "Scenario bundle directory")->required();
  record_cmd->add_option("--out", record_out, "Transcript output path");
  add_common_options(record_cmd, record_opts);

  // replay (--transcript comes from the common options)
  auto* replay_cmd = app.add_subcommand("replay", "Re-run an episode from a transcript");
  std::string replay_scenario;
  std::string replay_out;
  CommonOptions replay_opts;
  replay_cmd->add_option("--scenario", replay_scenario, "Scenario bundle directory")->required();
  replay_cmd->add_option("--out", replay_out, "Directory for episode.jsonl and plan.txt");
  add_common_options(replay_cmd, replay_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_episode_command(scenario_path, run_opts, out_dir);

    if (validate_cmd->parsed()) {
      lasp::ScenarioBundle bundle;
      try {
        bundle = lasp::load_bundle(validate_path);
      } catch (const std::exception& e) {
        std::cerr << "load failed: " << e.what() << "\n";
        return kExitValidation;
      }
      std::vector<std::string> errors = lasp::validate_bundle(bundle);
      if (errors.empty()) {
        std::cout << "ok: " << bundle.id << "\n";
        return kExitSuccess;
      }
      for (const auto& e : errors) std::cerr << "  - " << e << "\n";
      return kExitValidation;
    }

    if (record_cmd->parsed()) {
      record_opts.backend = "live";
      record_opts.record_path = record_out;
      return run_episode_command(record_scenario, record_opts, "");
    }

    if (replay_cmd->parsed()) {
      replay_opts.backend = "replay";
      return run_episode_command(replay_scenario, replay_opts, replay_out);
    }

    // bench
    std::vector<std::string> ids = case_ids;
    if (ids.empty())
      for (int i = 1; i <= 9; ++i) ids.push_back("case" + std::to_string(i));
    if (ids.empty()) {
      std::cerr << "no scenarios selected\n";
      return kExitValidation;
    }
    std::vector<lasp::ScenarioBundle> bundles;
    for (const auto& id : ids) {
      lasp::ScenarioBundle bundle = lasp::load_bundle(fs::path(scenarios_root) / id);
      std::vector<std::string> errors = lasp::validate_bundle(bundle);
      if (!errors.empty()) {
        std::cerr << id << " failed validation:\n";
        for (const auto& e : errors) std::cerr << "  - " << e << "\n";
        return kExitValidation;
      }
      bundles.push_back(std::move(bundle));
    }
    lasp::ObservationMode mode = bench_opts.observation == "paraphrase"
                                     ? lasp::ObservationMode::Paraphrase
                                     : lasp::ObservationMode::Template;
    lasp::BackendFactory factory = [&bench_opts](const lasp::ScenarioBundle& bundle) {
      return make_backend(bench_opts, bundle.path);
    };
    lasp::BenchReport report = lasp::bench(bundles, factory, budgets_of(bench_opts),
                                           chat_of(bench_opts), repetitions, mode, workers);
    std::string table = lasp::render_report_text(report);
    std::cout << table;
    std::cout << "wall time: " << report.wall.count() << " ms\n";
    if (!report_path.empty()) {
      std::ofstream(report_path + ".txt") << table;
      std::ofstream(report_path + ".json") << lasp::report_json(report).dump(2) << "\n";
      std::cout << "report written to " << report_path << ".{txt,json}\n";
    }
    for (const auto& row : report.cases)
      if (row.successes != row.repetitions) return kExitEpisodeFailed;
    return kExitSuccess;
  } catch (const lasp::BackendError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
