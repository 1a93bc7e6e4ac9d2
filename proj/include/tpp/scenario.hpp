#pragma once

#include <cstdint>
#include <string>

#include "tpp/world.hpp"

namespace tpp {

enum class Family { ManipulationCentric, EnvironmentCentric, HumanCentric };

std::string to_string(Family f);
/// Accepts manipulation-centric, environment-centric, human-centric.
Family parse_family(const std::string& name);

/// Selects the generator for the carried object and for its surroundings.
/// Pool 0 is the training distribution; pool 1 is the held-out one used by
/// the generalization study.
struct ScenarioVariant {
  int object_pool = 0;
  int environment_pool = 0;

  bool operator==(const ScenarioVariant&) const = default;
};

/// Seeded tabletop scene: 3 to 8 attributed boxes including the carried one,
/// start above the table on one side, goal on the other. The family fixes the
/// attribute mix:
///  - manipulation-centric: the carried object is liquid/fragile (pool 0) or
///    sharp/heavy (pool 1);
///  - environment-centric: an electronic or fragile box sits on the corridor
///    between start and goal;
///  - human-centric: a tall attribute-free box (or "human" when the attribute
///    set has it) stands next to the corridor.
Scene generate_scenario(Family family, std::uint64_t seed, ScenarioVariant variant = {},
                        const AttributeSet& attributes = AttributeSet::defaults());

}  // namespace tpp
