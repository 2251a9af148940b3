#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dualnav/policy.hpp"

namespace dualnav::wire {

// Request (stage 1):
//   {"stage":1,"prompt":str,"instruction":str,"topdown_image":base64 PPM}
// Request (stage 2):
//   {"stage":2,"prompt":str,"instruction":str,"topdown_image":base64 PPM,
//    "summary":{"Location":str,"Relationship":str,"Possible directions":str},
//    "candidates":[{"label":"F1","frontier":{"x":num,"y":num},"views":[base64 PPM]}]}
// Reply (stage 1): {"Location":str,"Relationship":str,"Possible directions":str}
// Reply (stage 2): {"Selected waypoint":"F<n>","Reasoning":str}
// A reply may also arrive wrapped in a one-element array, or as a bracketed
// key list ([ "k": "v", ... ]), which some models emit instead of an object.

struct EnvSummary {
  std::string location;
  std::string relationship;
  std::string possible_directions;
  friend bool operator==(const EnvSummary&, const EnvSummary&) = default;
};

std::string_view stage1_prompt() noexcept;
std::string_view stage2_prompt() noexcept;

std::string base64_encode(std::string_view bytes);
// Throws Error on characters outside the alphabet or bad padding.
std::string base64_decode(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hash_hex(std::string_view bytes);

nlohmann::ordered_json stage1_request(const PlanRequest& request);
nlohmann::ordered_json stage2_request(const PlanRequest& request, const EnvSummary& summary);
nlohmann::ordered_json summary_to_json(const EnvSummary& s);

// Throws SlowPlannerError(MalformedReply) naming the offending field.
nlohmann::json parse_reply_object(std::string_view body);
EnvSummary parse_stage1_reply(std::string_view body);
// Throws MalformedReply or InvalidSelection (label outside F1..F<count>).
FrontierChoice parse_stage2_reply(std::string_view body, int candidate_count);

}  // namespace dualnav::wire
