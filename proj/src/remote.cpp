#include "dualnav/remote.hpp"

#include <fstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

namespace dualnav {

namespace {

void split_endpoint(const std::string& endpoint, std::string& host, int& port) {
  std::string rest = endpoint;
  if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
  while (!rest.empty() && rest.back() == '/') rest.pop_back();
  const auto colon = rest.rfind(':');
  if (rest.empty() || colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
    throw Error(fmt::format("endpoint '{}' is not of the form host:port", endpoint));
  }
  host = rest.substr(0, colon);
  try {
    std::size_t used = 0;
    port = std::stoi(rest.substr(colon + 1), &used);
    if (used != rest.size() - colon - 1 || port <= 0 || port > 65535) throw std::out_of_range("port");
  } catch (const std::exception&) {
    throw Error(fmt::format("endpoint '{}' has an invalid port", endpoint));
  }
}

}  // namespace

RemoteSlowPlanner::RemoteSlowPlanner(RemoteConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.timeout_s <= 0.0) throw Error("remote timeout must be positive");
  split_endpoint(cfg_.endpoint, host_, port_);
}

void RemoteSlowPlanner::set_recorder(std::function<void(const Exchange&)> recorder) {
  recorder_ = std::move(recorder);
}

std::optional<wire::EnvSummary> RemoteSlowPlanner::last_summary() const {
  std::lock_guard lock(mu_);
  return last_summary_;
}

std::string RemoteSlowPlanner::post(int stage, const std::string& body) {
  httplib::Client client(host_, port_);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(cfg_.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!cfg_.token.empty()) headers.emplace("Authorization", "Bearer " + cfg_.token);

  const auto t0 = std::chrono::steady_clock::now();
  auto res = client.Post("/plan", headers, body, "application/json");
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed.count() >= cfg_.timeout_s * 0.9);
    if (timed_out) {
      throw SlowPlannerError(SlowErrorKind::Timeout,
                             fmt::format("stage {} got no reply within {:.3f} s", stage, cfg_.timeout_s));
    }
    throw SlowPlannerError(SlowErrorKind::Transport,
                           fmt::format("stage {}: {}", stage, httplib::to_string(err)));
  }
  if (recorder_) recorder_(Exchange{stage, wire::hash_hex(body), res->status, res->body});
  if (res->status != 200) {
    throw SlowPlannerError(SlowErrorKind::Transport, fmt::format("stage {}: HTTP {}", stage, res->status));
  }
  return res->body;
}

wire::EnvSummary RemoteSlowPlanner::stage1(const PlanRequest& request) {
  const std::string body = wire::stage1_request(request).dump();
  wire::EnvSummary s = wire::parse_stage1_reply(post(1, body));
  std::lock_guard lock(mu_);
  last_summary_ = s;
  return s;
}

FrontierChoice RemoteSlowPlanner::stage2(const PlanRequest& request, const wire::EnvSummary& summary) {
  const std::string body = wire::stage2_request(request, summary).dump();
  return wire::parse_stage2_reply(post(2, body), static_cast<int>(request.candidates.size()));
}

FrontierChoice RemoteSlowPlanner::plan(const PlanRequest& request) {
  if (request.candidates.empty()) throw SlowPlannerError(SlowErrorKind::NoCandidates, "no frontier candidates");
  const wire::EnvSummary summary = stage1(request);
  return stage2(request, summary);
}

struct PlannerServer::Impl {
  PlanHandler handler;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
};

PlannerServer::PlannerServer(PlanHandler handler) : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  impl_->server.Post("/plan", [this](const httplib::Request& req, httplib::Response& res) {
    HttpReply reply;
    try {
      reply = impl_->handler(req.body);
    } catch (const std::exception& e) {
      reply = HttpReply{500, fmt::format("{{\"error\":{}}}", nlohmann::json(e.what()).dump()), 0};
    }
    if (reply.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(reply.delay_ms));
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
}

PlannerServer::~PlannerServer() { stop(); }

int PlannerServer::start(const std::string& host, int port) {
  if (impl_->thread.joinable()) throw Error("planner server already running");
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(fmt::format("cannot bind {}:{}", host, port));
  impl_->host = host;
  impl_->port = bound;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void PlannerServer::serve_forever(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) throw Error(fmt::format("cannot listen on {}:{}", host, port));
}

void PlannerServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string PlannerServer::endpoint() const { return fmt::format("http://{}:{}", impl_->host, impl_->port); }

MockPlannerService::MockPlannerService(const EpisodeSpec& spec)
    : spec_(std::make_shared<const EpisodeSpec>(spec)), oracle_(std::make_shared<OracleSlowPlanner>(*spec_)) {}

HttpReply MockPlannerService::handle(const std::string& request_body) const {
  const auto req = nlohmann::json::parse(request_body);
  const int stage = req.at("stage").get<int>();
  nlohmann::ordered_json reply;
  if (stage == 1) {
    reply["Location"] = "A grid of narrow corridors with the agent near a branching point.";
    reply["Relationship"] = "Walls bound every corridor; unexplored space lies past the marked frontiers.";
    reply["Possible directions"] = "Continue along the corridor that the instruction describes.";
    return {200, reply.dump(), 0};
  }
  if (stage != 2) return {400, R"({"error":"unknown stage"})", 0};
  const auto& cands = req.at("candidates");
  if (cands.empty()) return {400, R"({"error":"no candidates"})", 0};
  const GridFrame& frame = spec_->grid.frame();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const Point p{cands[i].at("frontier").at("x").get<double>(), cands[i].at("frontier").at("y").get<double>()};
    const auto cell = frame.cell_at(p);
    const double d = cell ? oracle_->goal_distance(*cell) : std::numeric_limits<double>::infinity();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  const std::string label = cands[best].at("label").get<std::string>();
  reply["Selected waypoint"] = label;
  reply["Reasoning"] = fmt::format("{} leads along the corridor that continues toward the described destination.", label);
  return {200, reply.dump(), 0};
}

namespace {

std::string_view fixture_mode_name(FixtureMode m) { return m == FixtureMode::Strict ? "strict" : "sequential"; }

}  // namespace

Fixture load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open fixture {}", path.string()));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
  try {
    Fixture f;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "strict") {
      f.mode = FixtureMode::Strict;
    } else if (mode == "sequential") {
      f.mode = FixtureMode::Sequential;
    } else {
      throw Error(fmt::format("{}: unknown fixture mode '{}'", path.string(), mode));
    }
    f.description = j.value("description", "");
    for (const auto& e : j.at("exchanges")) {
      FixtureExchange x;
      x.request_hash = e.value("request_hash", "");
      x.stage = e.value("stage", 0);
      x.status = e.value("status", 200);
      x.body = e.at("body").get<std::string>();
      x.delay_ms = e.value("delay_ms", 0);
      f.exchanges.push_back(std::move(x));
    }
    if (j.contains("choices")) {
      for (const auto& c : j.at("choices")) {
        f.choices.push_back({c.at("index").get<int>(), c.at("label").get<std::string>(),
                             c.at("reasoning").get<std::string>()});
      }
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void save_fixture(const Fixture& fixture, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["mode"] = fixture_mode_name(fixture.mode);
  j["description"] = fixture.description;
  auto ex = nlohmann::ordered_json::array();
  for (const auto& e : fixture.exchanges) {
    nlohmann::ordered_json x;
    if (!e.request_hash.empty()) x["request_hash"] = e.request_hash;
    x["stage"] = e.stage;
    x["status"] = e.status;
    x["body"] = e.body;
    if (e.delay_ms > 0) x["delay_ms"] = e.delay_ms;
    ex.push_back(std::move(x));
  }
  j["exchanges"] = std::move(ex);
  auto ch = nlohmann::ordered_json::array();
  for (const auto& c : fixture.choices) {
    ch.push_back({{"index", c.selected_index}, {"label", c.selected_label}, {"reasoning", c.reasoning}});
  }
  j["choices"] = std::move(ch);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write fixture {}", path.string()));
  out << j.dump(2) << "\n";
}

FixtureService::FixtureService(Fixture fixture) : fixture_(std::move(fixture)) {
  if (fixture_.exchanges.empty()) throw Error("fixture has no exchanges");
}

HttpReply FixtureService::handle(const std::string& request_body) {
  std::lock_guard lock(mu_);
  ++served_;
  if (fixture_.mode == FixtureMode::Sequential) {
    const auto& x = fixture_.exchanges[std::min(next_, fixture_.exchanges.size() - 1)];
    ++next_;
    return {x.status, x.body, x.delay_ms};
  }
  const std::string hash = wire::hash_hex(request_body);
  for (const auto& x : fixture_.exchanges) {
    if (x.request_hash == hash) return {x.status, x.body, x.delay_ms};
  }
  return {404, fmt::format("{{\"error\":\"no recorded reply for request {}\"}}", hash), 0};
}

int FixtureService::served() const {
  std::lock_guard lock(mu_);
  return served_;
}

}  // namespace dualnav
