#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridscout/planner.hpp"
#include "gridscout/strategy.hpp"

namespace gridscout {

/// Planning/characterization backend. The rule backend computes locally; the
/// external backend speaks JSON over HTTP to a reasoning service. Backends
/// return std::nullopt when they cannot produce a usable answer; the
/// orchestration helpers below then substitute the rule result and flag the
/// fallback, so callers always end up with schema-legal output.
class Reasoner {
 public:
  virtual ~Reasoner() = default;

  virtual std::string name() const = 0;
  virtual std::optional<EnvCharacterization> characterize(
      const std::string& description, std::vector<std::string>* errors) = 0;
  virtual std::optional<std::vector<int>> propose_waypoints(
      const PlanRequest& request, std::vector<std::string>* errors) = 0;
};

class RuleReasoner final : public Reasoner {
 public:
  explicit RuleReasoner(PlannerWeights weights = {}) : weights_(weights) {}

  std::string name() const override { return "rule"; }
  std::optional<EnvCharacterization> characterize(
      const std::string& description, std::vector<std::string>* errors) override;
  std::optional<std::vector<int>> propose_waypoints(
      const PlanRequest& request, std::vector<std::string>* errors) override;

 private:
  PlannerWeights weights_;
};

struct ReasonerConfig {
  std::string backend = "rule";  // "rule" | "external"
  std::string endpoint;          // http://host:port/path
  double timeout_seconds = 10.0;
  std::string mode = "live";     // "live" | "record" | "replay"
  std::string fixture_path;      // JSONL request/response pairs
};

/// HTTP adapter. At most one request is in flight at a time; a request that
/// times out or returns an unusable body registers as failure and the caller
/// falls back. In record mode every live exchange is appended verbatim to
/// the fixture file; in replay mode responses come from the fixture only
/// (matched by exact request equality, each entry consumed once) and the
/// network is never touched.
class ExternalReasoner final : public Reasoner {
 public:
  explicit ExternalReasoner(ReasonerConfig config);

  std::string name() const override { return "external"; }
  std::optional<EnvCharacterization> characterize(
      const std::string& description, std::vector<std::string>* errors) override;
  std::optional<std::vector<int>> propose_waypoints(
      const PlanRequest& request, std::vector<std::string>* errors) override;

 private:
  struct Exchange {
    std::string request;   // compact JSON
    std::string response;  // raw body
    bool used = false;
  };

  std::optional<std::string> roundtrip(const std::string& request_json,
                                       std::vector<std::string>* errors);

  ReasonerConfig config_;
  std::vector<Exchange> fixtures_;
};

/// Wire request for a planning call: {"kind":"plan","graph":<text dump>,
/// "strategy":<object>,"memory":<object>,"current_node":<id>}. The expected
/// response is {"waypoints":[ids],"rationale":<text>}.
std::string plan_wire_request(const PlanRequest& request);

struct CharacterizeOutcome {
  EnvCharacterization characterization;
  bool used_fallback = false;
  std::vector<std::string> errors;
};

struct PlanOutcome {
  std::optional<GlobalPath> path;
  bool exploration_complete = false;
  bool used_fallback = false;
  std::vector<std::string> errors;
};

/// Characterize with validation and rule fallback. Throws
/// std::invalid_argument on an empty description.
CharacterizeOutcome characterize(const std::string& description,
                                 Reasoner& reasoner);

/// Plan with validation and rule fallback. Exploration-complete (no
/// community has utility left) is decided before any backend is consulted.
PlanOutcome plan_global_path(Reasoner& reasoner, const PlanRequest& request,
                             const PlannerWeights& fallback_weights = {});

std::unique_ptr<Reasoner> make_reasoner(const ReasonerConfig& config,
                                        PlannerWeights weights = {});

}  // namespace gridscout
