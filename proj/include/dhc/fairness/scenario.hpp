#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dhc::fair {

enum class ObjectiveForm { linear, log };
enum class WeightMode { uniform, demand };
enum class FairnessMode { uniform, proportional };

/// epsilon-fairness on the allocation vector: uniform compares p directly,
/// proportional compares p_i / alpha_i with alpha_i the demand share.
struct FairnessSpec {
    double epsilon = 0.0;
    FairnessMode mode = FairnessMode::uniform;
};

/// Objective form, objective weights, and an optional fairness constraint.
struct Scenario {
    std::string name;
    ObjectiveForm form = ObjectiveForm::linear;
    WeightMode weights = WeightMode::uniform;
    std::optional<FairnessSpec> fairness;
};

/// Presets s1, s2, s3, s4, s1f1, s1f2. The epsilon override only applies to the
/// fairness presets (default 0.85). Throws ModelError for unknown names or
/// epsilon outside [0, 1].
Scenario scenario_preset(std::string_view name, std::optional<double> epsilon = std::nullopt);

const std::vector<std::string>& scenario_names();

std::string_view to_string(FairnessMode m);

inline constexpr double kDefaultEpsilon = 0.85;

}  // namespace dhc::fair
