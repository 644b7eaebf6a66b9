#include "gridscout/strategy.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

#include "json.hpp"

namespace gridscout {
namespace {

using nlohmann::json;

template <typename E, size_t N>
struct EnumNames {
  std::array<std::string_view, N> names;

  std::string_view str(E v) const { return names[static_cast<size_t>(v)]; }
  std::optional<E> parse(std::string_view s) const {
    for (size_t i = 0; i < N; ++i)
      if (names[i] == s) return static_cast<E>(i);
    return std::nullopt;
  }
  std::vector<std::string> all() const {
    return std::vector<std::string>(names.begin(), names.end());
  }
};

constexpr EnumNames<Openness, 3> kOpenness{{"open", "moderate", "confined"}};
constexpr EnumNames<Complexity, 3> kComplexity{{"low", "moderate", "high"}};
constexpr EnumNames<Connectivity, 3> kConnectivity{{"low", "moderate", "high"}};
constexpr EnumNames<CorridorWidth, 3> kCorridorWidth{{"narrow", "moderate", "wide"}};
constexpr EnumNames<ObstacleDensity, 3> kDensity{{"sparse", "moderate", "dense"}};
constexpr EnumNames<Predictability, 3> kPredictability{{"regular", "moderate", "irregular"}};
constexpr EnumNames<HeightVariation, 3> kHeightVariation{{"flat", "moderate", "varied"}};
constexpr EnumNames<Difficulty, 3> kDifficulty{{"low", "moderate", "high"}};

constexpr EnumNames<CoverageStrategy, 3> kCoverage{{"balanced", "boundary_first", "region_sweep"}};
constexpr EnumNames<DirectionBias, 3> kDirection{{"none", "perimeter_following", "inward_spiral"}};
constexpr EnumNames<DepthStrategy, 3> kDepth{{"depth_first", "balanced_depth_breadth", "breadth_first"}};
constexpr EnumNames<CorridorHandling, 3> kCorridorHandling{{"natural_path", "centerline", "hug_walls"}};
constexpr EnumNames<EnergyPolicy, 3> kEnergy{{"aggressive", "moderate", "conservative"}};
constexpr EnumNames<TimeConstraint, 3> kTime{{"relaxed", "moderate", "strict_limit"}};
constexpr EnumNames<BacktrackTolerance, 3> kBacktrack{{"low", "moderate", "high"}};
constexpr EnumNames<RevisitPolicy, 3> kRevisit{{"allow", "minimize", "avoid"}};
constexpr EnumNames<ObstacleClearance, 3> kClearance{{"minimal", "standard", "conservative"}};
constexpr EnumNames<UnknownAreaApproach, 3> kUnknown{{"eager", "standard", "cautious"}};
constexpr EnumNames<DeadEndHandling, 3> kDeadEnd{{"avoid_entry", "explore_carefully", "mark_and_leave"}};
constexpr EnumNames<EscapeRouteAwareness, 2> kEscape{{"situational", "always_maintain"}};
constexpr EnumNames<CompletionCriteria, 3> kCompletion{{"full_coverage", "time_limited", "utility_threshold"}};
constexpr EnumNames<InformationPriority, 3> kInfo{{"coverage", "object_detection", "structure_mapping"}};
constexpr EnumNames<QualityVsSpeed, 3> kQuality{{"speed_first", "balanced", "quality_first"}};

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool has_any(const std::string& text, std::initializer_list<const char*> cues) {
  for (const char* cue : cues)
    if (text.find(cue) != std::string::npos) return true;
  return false;
}

// Pull a validated enum out of json[group][field]; report problems by path.
template <typename E, size_t N>
bool read_enum(const json& root, const char* group, const char* field,
               const EnumNames<E, N>& table, E& out,
               std::vector<std::string>* errors) {
  const std::string path = std::string(group) + "." + field;
  if (!root.contains(group) || !root[group].is_object() ||
      !root[group].contains(field)) {
    if (errors) errors->push_back("missing field " + path);
    return false;
  }
  const json& v = root[group][field];
  if (!v.is_string()) {
    if (errors) errors->push_back("non-string value at " + path);
    return false;
  }
  const auto parsed = table.parse(v.get<std::string>());
  if (!parsed) {
    if (errors)
      errors->push_back("illegal value '" + v.get<std::string>() + "' at " + path);
    return false;
  }
  out = *parsed;
  return true;
}

BacktrackTolerance shift(BacktrackTolerance v, int delta) {
  const int raw = std::clamp(static_cast<int>(v) + delta, 0, 2);
  return static_cast<BacktrackTolerance>(raw);
}

}  // namespace

std::string_view to_string(Openness v) { return kOpenness.str(v); }
std::string_view to_string(Complexity v) { return kComplexity.str(v); }
std::string_view to_string(Connectivity v) { return kConnectivity.str(v); }
std::string_view to_string(CorridorWidth v) { return kCorridorWidth.str(v); }
std::string_view to_string(ObstacleDensity v) { return kDensity.str(v); }
std::string_view to_string(Predictability v) { return kPredictability.str(v); }
std::string_view to_string(HeightVariation v) { return kHeightVariation.str(v); }
std::string_view to_string(Difficulty v) { return kDifficulty.str(v); }
std::string_view to_string(CoverageStrategy v) { return kCoverage.str(v); }
std::string_view to_string(DirectionBias v) { return kDirection.str(v); }
std::string_view to_string(DepthStrategy v) { return kDepth.str(v); }
std::string_view to_string(CorridorHandling v) { return kCorridorHandling.str(v); }
std::string_view to_string(EnergyPolicy v) { return kEnergy.str(v); }
std::string_view to_string(TimeConstraint v) { return kTime.str(v); }
std::string_view to_string(BacktrackTolerance v) { return kBacktrack.str(v); }
std::string_view to_string(RevisitPolicy v) { return kRevisit.str(v); }
std::string_view to_string(ObstacleClearance v) { return kClearance.str(v); }
std::string_view to_string(UnknownAreaApproach v) { return kUnknown.str(v); }
std::string_view to_string(DeadEndHandling v) { return kDeadEnd.str(v); }
std::string_view to_string(EscapeRouteAwareness v) { return kEscape.str(v); }
std::string_view to_string(CompletionCriteria v) { return kCompletion.str(v); }
std::string_view to_string(InformationPriority v) { return kInfo.str(v); }
std::string_view to_string(QualityVsSpeed v) { return kQuality.str(v); }

EnvCharacterization characterize_rule(const std::string& description) {
  if (description.empty())
    throw std::invalid_argument("characterize_rule: empty description");
  const std::string text = lowercase(description);
  EnvCharacterization c;

  // Confinement cues win over openness cues: "indoor open-plan office" is
  // still an indoor space.
  if (has_any(text, {"indoor", "enclosed", "confined", "interior"}))
    c.openness = Openness::confined;
  else if (has_any(text, {"outdoor", "open"}))
    c.openness = Openness::open;

  if (has_any(text, {"complex", "cluttered", "maze", "intricate"}))
    c.complexity = Complexity::high;
  else if (has_any(text, {"simple", "uniform", "plain"}))
    c.complexity = Complexity::low;

  if (has_any(text, {"corridor", "aisle", "tunnel", "bottleneck"}))
    c.connectivity = Connectivity::low;
  else if (has_any(text, {"interconnected", "well connected", "well-connected"}))
    c.connectivity = Connectivity::high;

  if (has_any(text, {"narrow", "tight", "aisle"}))
    c.corridor_width = CorridorWidth::narrow;
  else if (has_any(text, {"wide", "outdoor", "open"}))
    c.corridor_width = CorridorWidth::wide;

  if (has_any(text, {"dense", "crowded", "cluttered"}))
    c.density = ObstacleDensity::dense;
  else if (has_any(text, {"sparse", "empty", "barren"}))
    c.density = ObstacleDensity::sparse;

  if (has_any(text, {"natural", "tree", "uneven", "irregular", "random", "organic"}))
    c.predictability = Predictability::irregular;
  else if (has_any(text, {"arranged", "structured", "grid", "regular", "uniform"}))
    c.predictability = Predictability::regular;

  if (has_any(text, {"uneven", "terrain", "hill", "slope", "stairs", "multi-level"}))
    c.height_variation = HeightVariation::varied;

  if (c.density == ObstacleDensity::dense &&
      c.corridor_width == CorridorWidth::narrow)
    c.navigation_difficulty = Difficulty::high;
  else if (c.openness == Openness::open && c.density == ObstacleDensity::sparse)
    c.navigation_difficulty = Difficulty::low;

  if (has_any(text, {"cubicle", "room", "dead end", "cul-de-sac"}))
    c.dead_end_probability = Difficulty::high;
  else if (c.openness == Openness::open)
    c.dead_end_probability = Difficulty::low;

  if (c.connectivity == Connectivity::low)
    c.backtracking_necessity = Difficulty::high;
  else if (c.connectivity == Connectivity::high)
    c.backtracking_necessity = Difficulty::low;

  return c;
}

ExplorationStrategy derive_strategy(const EnvCharacterization& c,
                                    std::string description) {
  ExplorationStrategy s;  // defaults are the all-moderate identity row
  s.description = std::move(description);

  if (c.openness == Openness::open) {
    // Unbounded areas: sweep the rim first, chase detections, cap the run.
    s.coverage_strategy = CoverageStrategy::boundary_first;
    s.direction_bias = DirectionBias::perimeter_following;
    s.revisit_policy = RevisitPolicy::avoid;
    s.completion_criteria = CompletionCriteria::time_limited;
    s.information_priority = InformationPriority::object_detection;
  }

  if (c.corridor_width == CorridorWidth::narrow) {
    s.corridor_handling = CorridorHandling::centerline;
    s.depth_strategy = DepthStrategy::depth_first;
  }

  // Low connectivity raises entrapment risk: tolerate more backtracking and
  // keep escape routes in mind. High connectivity relaxes it.
  if (c.connectivity == Connectivity::low) {
    s.backtrack_tolerance = shift(s.backtrack_tolerance, +1);
    s.escape_route_awareness = EscapeRouteAwareness::always_maintain;
  } else if (c.connectivity == Connectivity::high) {
    s.backtrack_tolerance = shift(s.backtrack_tolerance, -1);
  }
  if (c.backtracking_necessity == Difficulty::high)
    s.backtrack_tolerance = shift(s.backtrack_tolerance, +1);

  // Dense or irregular obstacles: conservative motion and clearance.
  if (c.density == ObstacleDensity::dense) {
    s.obstacle_clearance = ObstacleClearance::conservative;
    s.unknown_area_approach = UnknownAreaApproach::cautious;
  }
  if (c.predictability == Predictability::irregular) {
    s.obstacle_clearance = ObstacleClearance::conservative;
    s.escape_route_awareness = EscapeRouteAwareness::always_maintain;
  }

  if (c.navigation_difficulty == Difficulty::high)
    s.quality_vs_speed = QualityVsSpeed::quality_first;

  if (c.height_variation == HeightVariation::varied)
    s.energy_policy = EnergyPolicy::conservative;

  if (c.dead_end_probability == Difficulty::high) {
    s.revisit_policy = RevisitPolicy::avoid;
    s.dead_end_handling = DeadEndHandling::mark_and_leave;
  }

  return s;
}

std::string to_json_string(const EnvCharacterization& c) {
  json j;
  j["spatial"]["openness"] = to_string(c.openness);
  j["spatial"]["complexity"] = to_string(c.complexity);
  j["spatial"]["connectivity"] = to_string(c.connectivity);
  j["spatial"]["corridor_width"] = to_string(c.corridor_width);
  j["obstacle"]["density"] = to_string(c.density);
  j["obstacle"]["predictability"] = to_string(c.predictability);
  j["obstacle"]["height_variation"] = to_string(c.height_variation);
  j["challenges"]["navigation_difficulty"] = to_string(c.navigation_difficulty);
  j["challenges"]["dead_end_probability"] = to_string(c.dead_end_probability);
  j["challenges"]["backtracking_necessity"] = to_string(c.backtracking_necessity);
  return j.dump();
}

std::optional<EnvCharacterization> characterization_from_json(
    const std::string& text, std::vector<std::string>* errors) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    if (errors) errors->push_back("malformed JSON");
    return std::nullopt;
  }
  EnvCharacterization c;
  bool ok = true;
  ok &= read_enum(j, "spatial", "openness", kOpenness, c.openness, errors);
  ok &= read_enum(j, "spatial", "complexity", kComplexity, c.complexity, errors);
  ok &= read_enum(j, "spatial", "connectivity", kConnectivity, c.connectivity, errors);
  ok &= read_enum(j, "spatial", "corridor_width", kCorridorWidth, c.corridor_width, errors);
  ok &= read_enum(j, "obstacle", "density", kDensity, c.density, errors);
  ok &= read_enum(j, "obstacle", "predictability", kPredictability, c.predictability, errors);
  ok &= read_enum(j, "obstacle", "height_variation", kHeightVariation, c.height_variation, errors);
  ok &= read_enum(j, "challenges", "navigation_difficulty", kDifficulty, c.navigation_difficulty, errors);
  ok &= read_enum(j, "challenges", "dead_end_probability", kDifficulty, c.dead_end_probability, errors);
  ok &= read_enum(j, "challenges", "backtracking_necessity", kDifficulty, c.backtracking_necessity, errors);
  if (!ok) return std::nullopt;
  return c;
}

std::string to_json_string(const ExplorationStrategy& s) {
  json j;
  j["description"] = s.description;
  j["spatial"]["coverage_strategy"] = to_string(s.coverage_strategy);
  j["spatial"]["direction_bias"] = to_string(s.direction_bias);
  j["spatial"]["depth_strategy"] = to_string(s.depth_strategy);
  j["spatial"]["corridor_handling"] = to_string(s.corridor_handling);
  j["efficiency"]["energy_policy"] = to_string(s.energy_policy);
  j["efficiency"]["time_constraint"] = to_string(s.time_constraint);
  j["efficiency"]["backtrack_tolerance"] = to_string(s.backtrack_tolerance);
  j["efficiency"]["revisit_policy"] = to_string(s.revisit_policy);
  j["safety"]["obstacle_clearance"] = to_string(s.obstacle_clearance);
  j["safety"]["unknown_area_approach"] = to_string(s.unknown_area_approach);
  j["safety"]["dead_end_handling"] = to_string(s.dead_end_handling);
  j["safety"]["escape_route_awareness"] = to_string(s.escape_route_awareness);
  j["task"]["completion_criteria"] = to_string(s.completion_criteria);
  j["task"]["information_priority"] = to_string(s.information_priority);
  j["task"]["quality_vs_speed"] = to_string(s.quality_vs_speed);
  return j.dump();
}

std::optional<ExplorationStrategy> strategy_from_json(
    const std::string& text, std::vector<std::string>* errors) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    if (errors) errors->push_back("malformed JSON");
    return std::nullopt;
  }
  ExplorationStrategy s;
  bool ok = true;
  if (j.contains("description") && j["description"].is_string())
    s.description = j["description"].get<std::string>();
  ok &= read_enum(j, "spatial", "coverage_strategy", kCoverage, s.coverage_strategy, errors);
  ok &= read_enum(j, "spatial", "direction_bias", kDirection, s.direction_bias, errors);
  ok &= read_enum(j, "spatial", "depth_strategy", kDepth, s.depth_strategy, errors);
  ok &= read_enum(j, "spatial", "corridor_handling", kCorridorHandling, s.corridor_handling, errors);
  ok &= read_enum(j, "efficiency", "energy_policy", kEnergy, s.energy_policy, errors);
  ok &= read_enum(j, "efficiency", "time_constraint", kTime, s.time_constraint, errors);
  ok &= read_enum(j, "efficiency", "backtrack_tolerance", kBacktrack, s.backtrack_tolerance, errors);
  ok &= read_enum(j, "efficiency", "revisit_policy", kRevisit, s.revisit_policy, errors);
  ok &= read_enum(j, "safety", "obstacle_clearance", kClearance, s.obstacle_clearance, errors);
  ok &= read_enum(j, "safety", "unknown_area_approach", kUnknown, s.unknown_area_approach, errors);
  ok &= read_enum(j, "safety", "dead_end_handling", kDeadEnd, s.dead_end_handling, errors);
  ok &= read_enum(j, "safety", "escape_route_awareness", kEscape, s.escape_route_awareness, errors);
  ok &= read_enum(j, "task", "completion_criteria", kCompletion, s.completion_criteria, errors);
  ok &= read_enum(j, "task", "information_priority", kInfo, s.information_priority, errors);
  ok &= read_enum(j, "task", "quality_vs_speed", kQuality, s.quality_vs_speed, errors);
  if (!ok) return std::nullopt;
  return s;
}

const std::map<std::string, std::vector<std::string>>&
characterization_vocabulary() {
  static const std::map<std::string, std::vector<std::string>> vocab = {
      {"spatial.openness", kOpenness.all()},
      {"spatial.complexity", kComplexity.all()},
      {"spatial.connectivity", kConnectivity.all()},
      {"spatial.corridor_width", kCorridorWidth.all()},
      {"obstacle.density", kDensity.all()},
      {"obstacle.predictability", kPredictability.all()},
      {"obstacle.height_variation", kHeightVariation.all()},
      {"challenges.navigation_difficulty", kDifficulty.all()},
      {"challenges.dead_end_probability", kDifficulty.all()},
      {"challenges.backtracking_necessity", kDifficulty.all()},
  };
  return vocab;
}

const std::map<std::string, std::vector<std::string>>& strategy_vocabulary() {
  static const std::map<std::string, std::vector<std::string>> vocab = {
      {"spatial.coverage_strategy", kCoverage.all()},
      {"spatial.direction_bias", kDirection.all()},
      {"spatial.depth_strategy", kDepth.all()},
      {"spatial.corridor_handling", kCorridorHandling.all()},
      {"efficiency.energy_policy", kEnergy.all()},
      {"efficiency.time_constraint", kTime.all()},
      {"efficiency.backtrack_tolerance", kBacktrack.all()},
      {"efficiency.revisit_policy", kRevisit.all()},
      {"safety.obstacle_clearance", kClearance.all()},
      {"safety.unknown_area_approach", kUnknown.all()},
      {"safety.dead_end_handling", kDeadEnd.all()},
      {"safety.escape_route_awareness", kEscape.all()},
      {"task.completion_criteria", kCompletion.all()},
      {"task.information_priority", kInfo.all()},
      {"task.quality_vs_speed", kQuality.all()},
  };
  return vocab;
}

}  // namespace gridscout
