#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dualnav/policy.hpp"
#include "dualnav/wire.hpp"

namespace dualnav {

struct RemoteConfig {
  std::string endpoint;  // "http://host:port" or "host:port"; requests go to /plan
  double timeout_s = 60.0;
  // Sent as "Authorization: Bearer <token>" when set. Read from
  // DUALNAV_ENDPOINT_TOKEN by the CLI.
  std::string token;
};

struct Exchange {
  int stage = 0;
  std::string request_hash;
  int status = 0;
  std::string body;
};

// Two-stage remote planner: stage 1 asks for an environment summary from the
// top-down map, stage 2 sends the summary plus per-candidate kept views and
// parses the selected label. Every failure surfaces as SlowPlannerError.
class RemoteSlowPlanner final : public SlowPlanner {
 public:
  explicit RemoteSlowPlanner(RemoteConfig cfg);

  FrontierChoice plan(const PlanRequest& request) override;

  wire::EnvSummary stage1(const PlanRequest& request);
  FrontierChoice stage2(const PlanRequest& request, const wire::EnvSummary& summary);

  // Receives every completed HTTP exchange (including non-200 replies).
  void set_recorder(std::function<void(const Exchange&)> recorder);
  std::optional<wire::EnvSummary> last_summary() const;

 private:
  std::string post(int stage, const std::string& body);

  RemoteConfig cfg_;
  std::string host_;
  int port_ = 0;
  std::function<void(const Exchange&)> recorder_;
  mutable std::mutex mu_;
  std::optional<wire::EnvSummary> last_summary_;
};

struct HttpReply {
  int status = 200;
  std::string body;
  int delay_ms = 0;  // served after sleeping this long
};

using PlanHandler = std::function<HttpReply(const std::string& request_body)>;

// Local HTTP server answering POST /plan on a background thread.
class PlannerServer {
 public:
  explicit PlannerServer(PlanHandler handler);
  ~PlannerServer();
  PlannerServer(const PlannerServer&) = delete;
  PlannerServer& operator=(const PlannerServer&) = delete;

  // port 0 binds any free port. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks until stopped (used by the CLI).
  void serve_forever(const std::string& host, int port);
  void stop();
  std::string endpoint() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Answers like a well-behaved model that happens to know the goal: a
// templated stage-1 summary and the geodesically best candidate in stage 2.
class MockPlannerService {
 public:
  explicit MockPlannerService(const EpisodeSpec& spec);
  HttpReply handle(const std::string& request_body) const;

 private:
  std::shared_ptr<const EpisodeSpec> spec_;
  std::shared_ptr<OracleSlowPlanner> oracle_;
};

enum class FixtureMode { Strict, Sequential };

struct FixtureExchange {
  std::string request_hash;  // empty in sequential fixtures
  int stage = 0;
  int status = 200;
  std::string body;
  int delay_ms = 0;
};

// Recorded planner session. Strict fixtures answer by request hash and
// reject unknown requests with 404; sequential fixtures answer in order and
// repeat the last reply once exhausted.
struct Fixture {
  FixtureMode mode = FixtureMode::Strict;
  std::string description;
  std::vector<FixtureExchange> exchanges;
  std::vector<FrontierChoice> choices;  // expected slow-planner outputs, in order
};

Fixture load_fixture(const std::filesystem::path& path);
void save_fixture(const Fixture& fixture, const std::filesystem::path& path);

class FixtureService {
 public:
  explicit FixtureService(Fixture fixture);
  HttpReply handle(const std::string& request_body);
  int served() const;

 private:
  Fixture fixture_;
  mutable std::mutex mu_;
  std::size_t next_ = 0;
  int served_ = 0;
};

}  // namespace dualnav
