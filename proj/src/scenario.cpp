#include "tpp/scenario.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "tpp/random.hpp"
#include "tpp/sampler.hpp"

namespace tpp {

std::string to_string(Family f) {
  switch (f) {
    case Family::ManipulationCentric: return "manipulation-centric";
    case Family::EnvironmentCentric: return "environment-centric";
    case Family::HumanCentric: return "human-centric";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "manipulation-centric" || name == "manipulation") return Family::ManipulationCentric;
  if (name == "environment-centric" || name == "environment") return Family::EnvironmentCentric;
  if (name == "human-centric" || name == "human") return Family::HumanCentric;
  throw std::invalid_argument("unknown scenario family: " + name);
}

namespace {

struct Layout {
  Vec3 start;
  Vec3 goal;
  double table;
  Vec3 region_lo;  // obstacle centre region (x, y only)
  Vec3 region_hi;
};

Layout layout_for(int environment_pool, Rng& rng) {
  const auto jitter = [&](double a) { return uniform(rng, -a, a); };
  Layout l;
  if (environment_pool == 0) {
    l.table = 0.70;
    l.start = Vec3(0.55 + jitter(0.04), -0.42 + jitter(0.04), 0.86 + jitter(0.02));
    l.goal = Vec3(0.55 + jitter(0.04), 0.42 + jitter(0.04), 0.80 + jitter(0.02));
    l.region_lo = Vec3(0.35, -0.28, 0.0);
    l.region_hi = Vec3(0.78, 0.28, 0.0);
  } else {
    l.table = 0.68;
    l.start = Vec3(0.45 + jitter(0.04), 0.45 + jitter(0.04), 0.90 + jitter(0.02));
    l.goal = Vec3(0.68 + jitter(0.04), -0.30 + jitter(0.04), 0.82 + jitter(0.02));
    l.region_lo = Vec3(0.40, -0.22, 0.0);
    l.region_hi = Vec3(0.82, 0.30, 0.0);
  }
  return l;
}

struct ObjectPool {
  std::size_t primary;
  std::size_t secondary;
  Vec3 half_extents;
};

ObjectPool object_pool(Family family, int pool) {
  const Vec3 cup(0.035, 0.035, 0.05);
  const Vec3 flat(0.05, 0.03, 0.035);
  switch (family) {
    case Family::ManipulationCentric:
      return pool == 0 ? ObjectPool{attr::kLiquid, attr::kFragile, cup} : ObjectPool{attr::kSharp, attr::kLiquid, flat};
    case Family::EnvironmentCentric:
      return pool == 0 ? ObjectPool{attr::kHeavy, attr::kLiquid, cup} : ObjectPool{attr::kHot, attr::kHeavy, flat};
    case Family::HumanCentric:
      return pool == 0 ? ObjectPool{attr::kSharp, attr::kHot, cup} : ObjectPool{attr::kLiquid, attr::kSharp, flat};
  }
  throw std::logic_error("unreachable");
}

std::vector<std::size_t> environment_attributes(int pool) {
  if (pool == 0) return {attr::kElectronic, attr::kFragile, attr::kHot};
  return {attr::kElectronic, attr::kHeavy, attr::kSharp};
}

bool clear_of(const Box& candidate, const std::vector<Box>& placed, double gap) {
  return std::none_of(placed.begin(), placed.end(), [&](const Box& b) {
    Box grown = b;
    grown.half_extents += Vec3::Constant(gap);
    return boxes_overlap(candidate, grown);
  });
}

}  // namespace

Scene generate_scenario(Family family, std::uint64_t seed, ScenarioVariant variant, const AttributeSet& attributes) {
  if (attributes.size() < 6) throw std::invalid_argument("scenario generator needs the default attributes");
  Rng rng(derive_seed(seed, 0x5ce4e));
  const std::size_t m = attributes.size();
  const Layout l = layout_for(variant.environment_pool, rng);

  Scene scene;
  scene.attributes = attributes;
  scene.arm = ArmModel::standard();
  scene.table_height = l.table;
  scene.goal = l.goal;

  const auto starts = inverse_kinematics(scene.arm, l.start);
  if (starts.empty()) throw std::logic_error("scenario start is unreachable");
  scene.start_config = starts.front();
  const Vec3 start_wrist = forward_kinematics(scene.arm, scene.start_config).wrist;

  const ObjectPool op = object_pool(family, variant.object_pool);
  SceneObject held;
  held.id = "held";
  held.box = Box{start_wrist, op.half_extents};
  held.attributes.assign(m, 0);
  held.attributes[op.primary] = 1;
  if (uniform01(rng) < 0.5) held.attributes[op.secondary] = 1;
  scene.manipulated_id = held.id;
  scene.objects.push_back(held);

  // Keep the start and goal footprints free so the task stays feasible.
  std::vector<Box> placed{Box{start_wrist, Vec3(0.10, 0.10, 1.0)}, Box{l.goal, Vec3(0.10, 0.10, 1.0)}};
  const auto env_attrs = environment_attributes(variant.environment_pool);

  const auto make_attrs = [&]() {
    std::vector<std::uint8_t> a(m, 0);
    const std::size_t first = uniform_index(rng, env_attrs.size());
    a[env_attrs[first]] = 1;
    if (uniform01(rng) < 0.3) a[env_attrs[(first + 1 + uniform_index(rng, env_attrs.size() - 1)) % env_attrs.size()]] = 1;
    return a;
  };

  const Vec3 mid = 0.5 * (l.start + l.goal);
  std::size_t box_id = 0;
  if (family == Family::EnvironmentCentric) {
    SceneObject o;
    o.id = "box" + std::to_string(box_id++);
    const Vec3 half(uniform(rng, 0.05, 0.08), uniform(rng, 0.05, 0.08), uniform(rng, 0.03, 0.06));
    o.box = Box{Vec3(mid.x() + uniform(rng, -0.03, 0.03), mid.y() + uniform(rng, -0.03, 0.03), l.table + half.z()), half};
    o.attributes.assign(m, 0);
    const bool electronic = variant.environment_pool == 1 || uniform01(rng) < 0.5;
    o.attributes[electronic ? attr::kElectronic : attr::kFragile] = 1;
    placed.push_back(o.box);
    scene.objects.push_back(std::move(o));
  }
  if (family == Family::HumanCentric) {
    SceneObject o;
    o.id = "human";
    const Vec3 half(0.12, 0.15, 0.35);
    o.box = Box{Vec3(mid.x() + 0.32, mid.y() + uniform(rng, -0.1, 0.1), l.table + half.z()), half};
    o.attributes.assign(m, 0);
    if (attributes.contains("human")) o.attributes[attributes.index_of("human")] = 1;
    placed.push_back(o.box);
    scene.objects.push_back(std::move(o));
  }

  const std::size_t total = 3 + uniform_index(rng, 6);  // 3..8 objects including the carried one
  for (int attempt = 0; attempt < 200 && scene.objects.size() < total; ++attempt) {
    const Vec3 half(uniform(rng, 0.03, 0.08), uniform(rng, 0.03, 0.08), uniform(rng, 0.03, 0.12));
    const Vec3 c(uniform(rng, l.region_lo.x(), l.region_hi.x()), uniform(rng, l.region_lo.y(), l.region_hi.y()),
                 l.table + half.z());
    const Box b{c, half};
    auto attrs = make_attrs();
    if (!clear_of(b, placed, 0.02)) continue;
    SceneObject o;
    o.id = "box" + std::to_string(box_id++);
    o.box = b;
    o.attributes = std::move(attrs);
    placed.push_back(b);
    scene.objects.push_back(std::move(o));
  }
  scene.validate();
  return scene;
}

}  // namespace tpp
