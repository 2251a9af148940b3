#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dualnav/metrics.hpp"
#include "dualnav/scheduler.hpp"

namespace dualnav {

enum class PolicyKind { Scripted, Oracle, Remote };

std::string_view policy_name(PolicyKind p) noexcept;
PolicyKind parse_policy(std::string_view name);

struct RunConfig {
  std::vector<std::filesystem::path> scenarios;  // files or directories of *.json
  PolicyKind policy = PolicyKind::Oracle;        // Scripted = fast only
  ScheduleMode mode = ScheduleMode::Dual;
  int ratio_k = 20;
  int latency_l = 8;
  double p_err = 0.25;
  double tau = 0.92;
  double d = 0.5;
  PruneMode prune = PruneMode::LastKept;
  WaypointFollow follow = WaypointFollow::Strict;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path out = "out";
  std::string endpoint;        // remote only
  std::string token;           // remote only, from the environment
  double timeout_s = 60.0;     // remote only
  double stub_latency_ms = 0;  // wall-clock delay added to every slow call
};

// Throws Error naming the first out-of-range field.
void validate(const RunConfig& cfg);
// The effective configuration as printed at startup and stored in log headers
// (the token is never included).
nlohmann::ordered_json config_to_json(const RunConfig& cfg);
ScheduleConfig schedule_config(const RunConfig& cfg);
PolicyFactory policy_factory(const RunConfig& cfg);

std::vector<std::pair<std::string, EpisodeSpec>> collect_scenarios(const std::vector<std::filesystem::path>& paths);

// Log text and SVG for one finished episode; the SVG is rendered from the
// parsed log so `render` reproduces it exactly.
struct EpisodeArtifacts {
  std::string log;
  std::string svg;
};
EpisodeArtifacts episode_artifacts(const std::string& name, std::uint64_t seed, const EpisodeSpec& spec,
                                   const EpisodeResult& result, const RunConfig& cfg);

// Writes <out>/episodes/<scenario>_s<seed>.{jsonl,svg}, <out>/metrics.{csv,json}
// and <out>/timing.{csv,json}. Returns 0 iff every episode finished and
// every file was written.
int cmd_run(const RunConfig& cfg, std::ostream& info, std::ostream& err);

struct SweepRow {
  std::string row;      // "(a)", "(b)", ...
  std::string setting;  // "fast only", "slow only", "10:1", ...
  MetricsReport report;
  int aborted = 0;
};

// Fast-only, slow-only, then one dual row per ratio, all on the same
// scenarios and seeds.
std::vector<SweepRow> sweep_rows(const std::vector<std::pair<std::string, EpisodeSpec>>& scenarios,
                                 const RunConfig& cfg, const std::vector<int>& ratios);
void write_sweep_table(std::ostream& out, const std::vector<SweepRow>& rows);
int cmd_sweep(const RunConfig& cfg, const std::vector<int>& ratios, std::ostream& info, std::ostream& err);

// Renders every *.jsonl log given (files or directories) into out_dir as
// <stem>.svg and <stem>.ppm (belief map). Malformed lines are fatal;
// truncated logs render partially with a warning.
int cmd_render(const std::vector<std::filesystem::path>& logs, const std::filesystem::path& out_dir,
               std::ostream& info, std::ostream& err);

// Runs one episode against an oracle-backed mock endpoint and stores every
// exchange plus the resulting choices as a strict replay fixture.
int cmd_record(const RunConfig& cfg, const std::filesystem::path& fixture_path, std::ostream& info,
               std::ostream& err);

// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dualnav
