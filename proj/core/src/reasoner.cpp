#include "gridscout/reasoner.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

namespace gridscout {
namespace {

using nlohmann::json;

// "http://host:port/path" -> (http://host:port, /path)
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw std::invalid_argument("reasoner endpoint must be a http URL");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

std::optional<EnvCharacterization> RuleReasoner::characterize(
    const std::string& description, std::vector<std::string>*) {
  return characterize_rule(description);
}

std::optional<std::vector<int>> RuleReasoner::propose_waypoints(
    const PlanRequest& request, std::vector<std::string>*) {
  const PlanResult result = plan_rule(request, weights_);
  if (!result.path) return std::nullopt;
  return result.path->waypoints;
}

ExternalReasoner::ExternalReasoner(ReasonerConfig config)
    : config_(std::move(config)) {
  if (config_.mode != "live" && config_.mode != "record" &&
      config_.mode != "replay")
    throw std::invalid_argument("reasoner mode must be live, record, or replay");
  if (config_.mode != "live" && config_.fixture_path.empty())
    throw std::invalid_argument("record/replay mode needs a fixture path");
  if (config_.mode != "replay") split_endpoint(config_.endpoint);  // validate

  if (config_.mode == "replay") {
    std::ifstream in(config_.fixture_path);
    if (!in)
      throw std::invalid_argument("cannot open reasoner fixture " +
                                  config_.fixture_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("request") || !j.contains("response"))
        throw std::invalid_argument("malformed reasoner fixture line");
      fixtures_.push_back({j["request"].dump(), j["response"].get<std::string>(),
                           false});
    }
  }
}

std::optional<std::string> ExternalReasoner::roundtrip(
    const std::string& request_json, std::vector<std::string>* errors) {
  if (config_.mode == "replay") {
    const std::string key = json::parse(request_json).dump();
    for (Exchange& e : fixtures_) {
      if (e.used || e.request != key) continue;
      e.used = true;
      return e.response;
    }
    if (errors) errors->push_back("no recorded response for request");
    return std::nullopt;
  }

  const auto [base, path] = split_endpoint(config_.endpoint);
  httplib::Client client(base);
  const auto timeout = std::chrono::milliseconds(
      static_cast<long long>(config_.timeout_seconds * 1000.0));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const httplib::Result result =
      client.Post(path, request_json, "application/json");
  if (!result || result->status != 200) {
    if (errors)
      errors->push_back("external reasoner unreachable or non-200 status");
    return std::nullopt;
  }

  if (config_.mode == "record") {
    std::ofstream out(config_.fixture_path, std::ios::app);
    json line;
    line["request"] = json::parse(request_json);
    line["response"] = result->body;
    out << line.dump() << '\n';
  }
  return result->body;
}

std::optional<EnvCharacterization> ExternalReasoner::characterize(
    const std::string& description, std::vector<std::string>* errors) {
  json req;
  req["kind"] = "characterize";
  req["description"] = description;
  const auto body = roundtrip(req.dump(), errors);
  if (!body) return std::nullopt;
  return characterization_from_json(*body, errors);
}

std::optional<std::vector<int>> ExternalReasoner::propose_waypoints(
    const PlanRequest& request, std::vector<std::string>* errors) {
  const auto body = roundtrip(plan_wire_request(request), errors);
  if (!body) return std::nullopt;
  json j = json::parse(*body, nullptr, false);
  if (j.is_discarded() || !j.contains("waypoints") ||
      !j["waypoints"].is_array()) {
    if (errors) errors->push_back("plan response missing waypoint array");
    return std::nullopt;
  }
  std::vector<int> waypoints;
  for (const json& v : j["waypoints"]) {
    if (!v.is_number_integer()) {
      if (errors) errors->push_back("non-integer waypoint id in response");
      return std::nullopt;
    }
    waypoints.push_back(v.get<int>());
  }
  return waypoints;
}

std::string plan_wire_request(const PlanRequest& request) {
  if (!request.global || !request.full)
    throw std::invalid_argument("plan_wire_request: missing graph snapshots");
  json req;
  req["kind"] = "plan";
  req["graph"] = dump_graph(*request.full);
  req["strategy"] = json::parse(to_json_string(request.strategy));
  req["memory"] = json::parse(to_json_string(request.memory));
  req["current_node"] = request.current_node;
  return req.dump();
}

CharacterizeOutcome characterize(const std::string& description,
                                 Reasoner& reasoner) {
  if (description.empty())
    throw std::invalid_argument("characterize: empty description");
  CharacterizeOutcome outcome;
  const auto result = reasoner.characterize(description, &outcome.errors);
  if (result) {
    outcome.characterization = *result;
    return outcome;
  }
  outcome.characterization = characterize_rule(description);
  outcome.used_fallback = reasoner.name() != "rule";
  return outcome;
}

PlanOutcome plan_global_path(Reasoner& reasoner, const PlanRequest& request,
                             const PlannerWeights& fallback_weights) {
  PlanOutcome outcome;
  bool any_utility = false;
  if (!request.global)
    throw std::invalid_argument("plan_global_path: missing global graph");
  for (const GlobalNode& c : request.global->nodes)
    if (c.aggregate_utility > 0) any_utility = true;
  if (!any_utility) {
    outcome.exploration_complete = true;
    return outcome;
  }

  const auto proposal = reasoner.propose_waypoints(request, &outcome.errors);
  if (proposal) {
    auto path = ground_waypoints(request, *proposal, &outcome.errors);
    if (path) {
      outcome.path = std::move(path);
      return outcome;
    }
  }

  const PlanResult fallback = plan_rule(request, fallback_weights);
  outcome.path = fallback.path;
  outcome.exploration_complete = fallback.exploration_complete;
  outcome.used_fallback = reasoner.name() != "rule";
  return outcome;
}

std::unique_ptr<Reasoner> make_reasoner(const ReasonerConfig& config,
                                        PlannerWeights weights) {
  if (config.backend == "rule") return std::make_unique<RuleReasoner>(weights);
  if (config.backend == "external")
    return std::make_unique<ExternalReasoner>(config);
  throw std::invalid_argument("unknown reasoner backend " + config.backend);
}

}  // namespace gridscout
