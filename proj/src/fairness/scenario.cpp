#include "dhc/fairness/scenario.hpp"

#include "dhc/common/error.hpp"

#include <cmath>

#include <fmt/core.h>

namespace dhc::fair {

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"s1", "s2", "s3", "s4", "s1f1", "s1f2"};
    return names;
}

std::string_view to_string(FairnessMode m) { return m == FairnessMode::uniform ? "uniform" : "proportional"; }

Scenario scenario_preset(std::string_view name, std::optional<double> epsilon) {
    const double eps = epsilon.value_or(kDefaultEpsilon);
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw ModelError(fmt::format("epsilon must lie in [0, 1], got {}", eps));
    }
    Scenario s;
    s.name = std::string(name);
    if (name == "s1") {
        return s;
    }
    if (name == "s2") {
        s.weights = WeightMode::demand;
        return s;
    }
    if (name == "s3") {
        s.form = ObjectiveForm::log;
        return s;
    }
    if (name == "s4") {
        s.form = ObjectiveForm::log;
        s.weights = WeightMode::demand;
        return s;
    }
    if (name == "s1f1") {
        s.fairness = FairnessSpec{eps, FairnessMode::uniform};
        return s;
    }
    if (name == "s1f2") {
        s.fairness = FairnessSpec{eps, FairnessMode::proportional};
        return s;
    }
    throw ModelError(fmt::format("unknown scenario '{}' (expected s1, s2, s3, s4, s1f1 or s1f2)", name));
}

}  // namespace dhc::fair
