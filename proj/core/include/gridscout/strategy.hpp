#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridscout {

// ----------------------------------------------------------- vocabularies --
// Every field is a closed three-level (occasionally two-level) vocabulary;
// JSON (de)serialization uses the snake_case token of each enumerator.

enum class Openness { open, moderate, confined };
enum class Complexity { low, moderate, high };
enum class Connectivity { low, moderate, high };
enum class CorridorWidth { narrow, moderate, wide };
enum class ObstacleDensity { sparse, moderate, dense };
enum class Predictability { regular, moderate, irregular };
enum class HeightVariation { flat, moderate, varied };
enum class Difficulty { low, moderate, high };  // navigation / dead-end / backtracking

enum class CoverageStrategy { balanced, boundary_first, region_sweep };
enum class DirectionBias { none, perimeter_following, inward_spiral };
enum class DepthStrategy { depth_first, balanced_depth_breadth, breadth_first };
enum class CorridorHandling { natural_path, centerline, hug_walls };
enum class EnergyPolicy { aggressive, moderate, conservative };
enum class TimeConstraint { relaxed, moderate, strict_limit };
enum class BacktrackTolerance { low, moderate, high };
enum class RevisitPolicy { allow, minimize, avoid };
enum class ObstacleClearance { minimal, standard, conservative };
enum class UnknownAreaApproach { eager, standard, cautious };
enum class DeadEndHandling { avoid_entry, explore_carefully, mark_and_leave };
enum class EscapeRouteAwareness { situational, always_maintain };
enum class CompletionCriteria { full_coverage, time_limited, utility_threshold };
enum class InformationPriority { coverage, object_detection, structure_mapping };
enum class QualityVsSpeed { speed_first, balanced, quality_first };

/// Structured reading of a free-text environment description: three aspect
/// groups, every field always populated with a vocabulary value.
struct EnvCharacterization {
  // spatial characteristics
  Openness openness = Openness::moderate;
  Complexity complexity = Complexity::moderate;
  Connectivity connectivity = Connectivity::moderate;
  CorridorWidth corridor_width = CorridorWidth::moderate;
  // obstacle characteristics
  ObstacleDensity density = ObstacleDensity::moderate;
  Predictability predictability = Predictability::moderate;
  HeightVariation height_variation = HeightVariation::flat;
  // exploration challenges
  Difficulty navigation_difficulty = Difficulty::moderate;
  Difficulty dead_end_probability = Difficulty::moderate;
  Difficulty backtracking_necessity = Difficulty::moderate;

  friend bool operator==(const EnvCharacterization&,
                         const EnvCharacterization&) = default;
};

/// Behavior profile over four axes, produced from a characterization by a
/// deterministic rule table.
struct ExplorationStrategy {
  std::string description;
  // spatial axis
  CoverageStrategy coverage_strategy = CoverageStrategy::balanced;
  DirectionBias direction_bias = DirectionBias::none;
  DepthStrategy depth_strategy = DepthStrategy::balanced_depth_breadth;
  CorridorHandling corridor_handling = CorridorHandling::natural_path;
  // efficiency axis
  EnergyPolicy energy_policy = EnergyPolicy::moderate;
  TimeConstraint time_constraint = TimeConstraint::moderate;
  BacktrackTolerance backtrack_tolerance = BacktrackTolerance::moderate;
  RevisitPolicy revisit_policy = RevisitPolicy::minimize;
  // safety axis
  ObstacleClearance obstacle_clearance = ObstacleClearance::standard;
  UnknownAreaApproach unknown_area_approach = UnknownAreaApproach::standard;
  DeadEndHandling dead_end_handling = DeadEndHandling::explore_carefully;
  EscapeRouteAwareness escape_route_awareness = EscapeRouteAwareness::situational;
  // task axis
  CompletionCriteria completion_criteria = CompletionCriteria::full_coverage;
  InformationPriority information_priority = InformationPriority::coverage;
  QualityVsSpeed quality_vs_speed = QualityVsSpeed::balanced;

  friend bool operator==(const ExplorationStrategy&,
                         const ExplorationStrategy&) = default;
};

std::string_view to_string(Openness v);
std::string_view to_string(Complexity v);
std::string_view to_string(Connectivity v);
std::string_view to_string(CorridorWidth v);
std::string_view to_string(ObstacleDensity v);
std::string_view to_string(Predictability v);
std::string_view to_string(HeightVariation v);
std::string_view to_string(Difficulty v);
std::string_view to_string(CoverageStrategy v);
std::string_view to_string(DirectionBias v);
std::string_view to_string(DepthStrategy v);
std::string_view to_string(CorridorHandling v);
std::string_view to_string(EnergyPolicy v);
std::string_view to_string(TimeConstraint v);
std::string_view to_string(BacktrackTolerance v);
std::string_view to_string(RevisitPolicy v);
std::string_view to_string(ObstacleClearance v);
std::string_view to_string(UnknownAreaApproach v);
std::string_view to_string(DeadEndHandling v);
std::string_view to_string(EscapeRouteAwareness v);
std::string_view to_string(CompletionCriteria v);
std::string_view to_string(InformationPriority v);
std::string_view to_string(QualityVsSpeed v);

/// Keyword-table characterizer: scans the (lowercased) description for cue
/// words and fills every field, falling back to the stated defaults. This is
/// the rule-based backend; an external reasoner may override it when its
/// response validates. Throws std::invalid_argument on an empty description.
EnvCharacterization characterize_rule(const std::string& description);

/// Deterministic rule table from characterization to strategy. The
/// description is carried through verbatim for logs and prompts.
ExplorationStrategy derive_strategy(const EnvCharacterization& c,
                                    std::string description = "");

// ------------------------------------------------------- JSON round-trips --
// Compact JSON with grouped keys ("spatial"/"obstacle"/"challenges" for the
// characterization; "spatial"/"efficiency"/"safety"/"task" for the
// strategy). Parsing validates against the closed vocabularies: any missing
// key or out-of-vocabulary value fails the parse and is reported in
// `errors`, one message per violation.

std::string to_json_string(const EnvCharacterization& c);
std::optional<EnvCharacterization> characterization_from_json(
    const std::string& text, std::vector<std::string>* errors = nullptr);

std::string to_json_string(const ExplorationStrategy& s);
std::optional<ExplorationStrategy> strategy_from_json(
    const std::string& text, std::vector<std::string>* errors = nullptr);

/// Field path ("spatial.openness", "task.quality_vs_speed", ...) to the list
/// of legal tokens, for schema introspection and tests.
const std::map<std::string, std::vector<std::string>>&
characterization_vocabulary();
const std::map<std::string, std::vector<std::string>>& strategy_vocabulary();

}  // namespace gridscout
