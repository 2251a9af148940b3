#include "dualnav/wire.hpp"

#include <charconv>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "dualnav/render.hpp"

namespace dualnav::wire {

namespace {

constexpr std::string_view kStage1Prompt =
    "You will receive a top-down occupancy image of the area explored so far and a navigation "
    "instruction. Describe the scene for a route planner.\n"
    "Reply with one JSON object holding three string fields:\n"
    "  \"Location\": where the agent currently is,\n"
    "  \"Relationship\": how nearby structures relate to the agent and to the instruction,\n"
    "  \"Possible directions\": the directions the agent could take next.\n"
    "Reply with the JSON object only.\n";

constexpr std::string_view kStage2Prompt =
    "You will receive a scene description, a navigation instruction and, for each candidate "
    "waypoint F1..Fn, the views an agent would see while driving to it. Pick the single candidate "
    "that best advances the instruction.\n"
    "Reply with one JSON object holding two string fields:\n"
    "  \"Selected waypoint\": the label of the chosen candidate, exactly as given (for example \"F2\"),\n"
    "  \"Reasoning\": a short justification.\n"
    "Only labels from the candidate list are valid. Reply with the JSON object only.\n";

[[noreturn]] void malformed(const std::string& msg) {
  throw SlowPlannerError(SlowErrorKind::MalformedReply, msg);
}

std::string required_string(const nlohmann::json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) malformed(fmt::format("missing field \"{}\"", field));
  if (!it->is_string()) malformed(fmt::format("field \"{}\" is not a string", field));
  return it->get<std::string>();
}

}  // namespace

std::string_view stage1_prompt() noexcept { return kStage1Prompt; }
std::string_view stage2_prompt() noexcept { return kStage2Prompt; }

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error("base64: length is not a multiple of 4");
  if (text.empty()) return {};
  std::string out(text.size() / 4 * 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
  if (n < 0) throw Error("base64: invalid input");
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::string_view bytes) { return fmt::format("{:016x}", fnv1a64(bytes)); }

namespace {

nlohmann::ordered_json base_request(int stage, const PlanRequest& request) {
  std::vector<Frontier> frontiers;
  frontiers.reserve(request.candidates.size());
  for (const auto& c : request.candidates) frontiers.push_back(c.frontier);
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["prompt"] = stage == 1 ? kStage1Prompt : kStage2Prompt;
  j["instruction"] = request.instruction;
  j["topdown_image"] = base64_encode(map_to_ppm(request.topdown, frontiers));
  return j;
}

}  // namespace

nlohmann::ordered_json summary_to_json(const EnvSummary& s) {
  nlohmann::ordered_json j;
  j["Location"] = s.location;
  j["Relationship"] = s.relationship;
  j["Possible directions"] = s.possible_directions;
  return j;
}

nlohmann::ordered_json stage1_request(const PlanRequest& request) { return base_request(1, request); }

nlohmann::ordered_json stage2_request(const PlanRequest& request, const EnvSummary& summary) {
  nlohmann::ordered_json j = base_request(2, request);
  j["summary"] = summary_to_json(summary);
  auto cands = nlohmann::ordered_json::array();
  for (const auto& c : request.candidates) {
    nlohmann::ordered_json cj;
    cj["label"] = c.label;
    cj["frontier"] = {{"x", c.target.x}, {"y", c.target.y}};
    auto views = nlohmann::ordered_json::array();
    for (int k : c.kept) views.push_back(base64_encode(patch_to_ppm(c.views.at(static_cast<std::size_t>(k)))));
    cj["views"] = std::move(views);
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  return j;
}

nlohmann::json parse_reply_object(std::string_view body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) {
    // The bracketed key list ["k": "v", ...] is not JSON; retry it as an object.
    const auto first = body.find_first_not_of(" \t\r\n");
    const auto last = body.find_last_not_of(" \t\r\n");
    if (first != std::string_view::npos && body[first] == '[' && body[last] == ']') {
      std::string patched(body.substr(first, last - first + 1));
      patched.front() = '{';
      patched.back() = '}';
      j = nlohmann::json::parse(patched, nullptr, false);
    }
    if (j.is_discarded()) malformed("reply is not valid JSON");
  }
  if (j.is_array()) {
    if (j.size() != 1) malformed(fmt::format("expected one reply object, got an array of {}", j.size()));
    j = j[0];
  }
  if (!j.is_object()) malformed("reply is not a JSON object");
  return j;
}

EnvSummary parse_stage1_reply(std::string_view body) {
  const nlohmann::json j = parse_reply_object(body);
  EnvSummary s;
  s.location = required_string(j, "Location");
  s.relationship = required_string(j, "Relationship");
  s.possible_directions = required_string(j, "Possible directions");
  return s;
}

FrontierChoice parse_stage2_reply(std::string_view body, int candidate_count) {
  const nlohmann::json j = parse_reply_object(body);
  const std::string label = required_string(j, "Selected waypoint");
  std::string reasoning = required_string(j, "Reasoning");
  int number = 0;
  const char* b = label.data();
  const char* e = label.data() + label.size();
  if (label.size() < 2 || label[0] != 'F' || std::from_chars(b + 1, e, number).ptr != e) {
    throw SlowPlannerError(SlowErrorKind::InvalidSelection, fmt::format("unrecognized waypoint label \"{}\"", label));
  }
  if (number < 1 || number > candidate_count) {
    throw SlowPlannerError(SlowErrorKind::InvalidSelection,
                           fmt::format("waypoint \"{}\" outside F1..F{}", label, candidate_count));
  }
  return {number - 1, frontier_label(number - 1), std::move(reasoning)};
}

}  // namespace dualnav::wire
