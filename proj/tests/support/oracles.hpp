#pragma once
// Brute-force reference implementations used to cross-check the pipeline.
// They are written from the definitions, not from the library code: FK by
// composing rotations, the DFT with complex exponentials, and every min/max
// by a flat scan.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "tpp/features.hpp"
#include "tpp/trajectory.hpp"
#include "tpp/world.hpp"

namespace oracle {

using tpp::Vec3;

struct Pose {
  Vec3 elbow;
  Vec3 wrist;
};

inline Pose fk(const tpp::ArmModel& arm, const tpp::ArmConfig& c) {
  const Eigen::Matrix3d yaw = Eigen::AngleAxisd(c.q[0], Vec3::UnitZ()).toRotationMatrix();
  // Positive pitch lifts the link, i.e. a negative rotation about +y.
  const Eigen::Matrix3d upper = yaw * Eigen::AngleAxisd(-c.q[1], Vec3::UnitY()).toRotationMatrix();
  const Eigen::Matrix3d fore = upper * Eigen::AngleAxisd(-c.q[2], Vec3::UnitY()).toRotationMatrix();
  Pose p;
  p.elbow = arm.shoulder_origin + upper * Vec3(arm.link_upper, 0, 0);
  p.wrist = p.elbow + fore * Vec3(arm.link_fore, 0, 0);
  return p;
}

/// Object up-axis tilt from vertical, via the rotated axis itself.
inline double deviation(const tpp::ArmConfig& c) {
  const Eigen::Matrix3d r = Eigen::AngleAxisd(-(c.q[1] + c.q[2] + c.q[3]), Vec3::UnitY()).toRotationMatrix();
  const Vec3 up = r * Vec3::UnitZ();
  return std::atan2(up.cross(Vec3::UnitZ()).norm(), up.dot(Vec3::UnitZ()));
}

inline double interval_gap(double lo1, double hi1, double lo2, double hi2) {
  return std::max({0.0, lo2 - hi1, lo1 - hi2});
}

inline Vec3 box_gap(const Vec3& c1, const Vec3& h1, const Vec3& c2, const Vec3& h2) {
  Vec3 g;
  for (int a = 0; a < 3; ++a) g[a] = interval_gap(c1[a] - h1[a], c1[a] + h1[a], c2[a] - h2[a], c2[a] + h2[a]);
  return g;
}

inline bool below(const tpp::SceneObject& o, const Vec3& p) {
  const Vec3 lo = o.box.center - o.box.half_extents;
  const Vec3 hi = o.box.center + o.box.half_extents;
  return hi.z() < p.z() && p.x() >= lo.x() - 0.05 && p.x() <= hi.x() + 0.05 && p.y() >= lo.y() - 0.05 &&
         p.y() <= hi.y() + 0.05;
}

struct Edge {
  std::size_t j;
  std::size_t k;
  Eigen::Vector4d base;
};

inline std::vector<Edge> edges(const tpp::Scene& s, const tpp::Trajectory& t, double tau) {
  std::vector<Edge> out;
  const tpp::SceneObject& held = s.manipulated();
  for (std::size_t j = 0; j < t.size(); ++j) {
    const Vec3 w = fk(s.arm, t.waypoints[j]).wrist;
    for (std::size_t k = 0; k < s.objects.size(); ++k) {
      if (s.objects[k].id == s.manipulated_id) continue;
      const Vec3 g = box_gap(w, held.box.half_extents, s.objects[k].box.center, s.objects[k].box.half_extents);
      const bool b = below(s.objects[k], w);
      if (std::sqrt(g.x() * g.x() + g.y() * g.y() + g.z() * g.z()) < tau || b)
        out.push_back({j, k, Eigen::Vector4d(g.x(), g.y(), g.z(), b ? 1.0 : 0.0)});
    }
  }
  return out;
}

inline Eigen::VectorXd phi_o(const tpp::Scene& s, const std::vector<Edge>& es) {
  const std::size_t m = s.attributes.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(4 * m * m));
  const auto& held = s.manipulated();
  for (const auto& e : es)
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = 0; q < m; ++q)
        if (s.objects[e.k].attributes[p] && held.attributes[q])
          for (int a = 0; a < 4; ++a) out[static_cast<Eigen::Index>(4 * (p * m + q) + a)] += e.base[a];
  return out;
}

/// Waypoint index lists of the three parts.
inline std::vector<std::vector<std::size_t>> parts(std::size_t n) {
  const std::size_t a = (n + 2) / 3;
  const std::size_t b = (n - a + 1) / 2;
  std::vector<std::vector<std::size_t>> out(3);
  for (std::size_t j = 0; j < n; ++j) out[j < a ? 0 : j < a + b ? 1 : 2].push_back(j);
  return out;
}

inline std::vector<double> psd(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> out;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t t = 0; t < n; ++t)
      acc += (x[t] - mean) * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) *
                                                  static_cast<double>(t) / static_cast<double>(n));
    const double weight = (2 * k == n) ? 1.0 : 2.0;
    out.push_back(weight * std::norm(acc) / static_cast<double>(n * n));
  }
  return out;
}

inline std::pair<double, double> bands(const std::vector<double>& x) {
  const auto p = psd(x);
  if (p.empty()) return {0.0, 0.0};
  const std::size_t low_count = (p.size() + 1) / 2;
  double lo = 0, hi = 0;
  for (std::size_t i = 0; i < p.size(); ++i) (i < low_count ? lo : hi) += p[i];
  const std::size_t high_count = p.size() - low_count;
  return {lo / static_cast<double>(low_count), high_count ? hi / static_cast<double>(high_count) : 0.0};
}

inline std::vector<double> pick(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

inline Eigen::VectorXd phi_robot(const tpp::Scene& s, const tpp::Trajectory& t) {
  const std::size_t n = t.size();
  std::vector<std::array<double, 3>> wr(n), el(n);
  const Vec3 o = s.arm.shoulder_origin;
  const auto cyl = [&](const Vec3& p) {
    const Vec3 d = p - o;
    const double r = std::sqrt(d.x() * d.x() + d.y() * d.y());
    return std::array<double, 3>{r, r < 1e-12 ? 0.0 : std::atan2(d.y(), d.x()), d.z()};
  };
  for (std::size_t j = 0; j < n; ++j) {
    const Pose p = fk(s.arm, t.waypoints[j]);
    wr[j] = cyl(p.wrist);
    el[j] = cyl(p.elbow);
  }
  Eigen::VectorXd out(27);
  const auto ps = parts(n);
  for (int part = 0; part < 3; ++part) {
    for (int c = 0; c < 3; ++c) {
      double mx = -1e300, mn = 1e300;
      std::size_t arg = ps[part].front();
      for (auto j : ps[part]) {
        mx = std::max({mx, wr[j][c], el[j][c]});
        mn = std::min({mn, wr[j][c], el[j][c]});
        if (wr[j][c] > wr[arg][c]) arg = j;
      }
      out[9 * part + c] = mx;
      out[9 * part + 3 + c] = mn;
      out[9 * part + 6 + c] = el[arg][c];
    }
  }
  return out;
}

inline Eigen::VectorXd phi_object(const tpp::Scene& s, const tpp::Trajectory& t) {
  const std::size_t n = t.size();
  std::vector<double> dev(n), rel(n), x(n), y(n), z(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec3 w = fk(s.arm, t.waypoints[j]).wrist;
    x[j] = w.x();
    y[j] = w.y();
    z[j] = w.z();
    dev[j] = deviation(t.waypoints[j]);
  }
  for (std::size_t j = 0; j < n; ++j) rel[j] = std::abs(dev[j] - dev[n - 1]);
  Eigen::VectorXd out(28);
  const auto ps = parts(n);
  for (int part = 0; part < 3; ++part) {
    double worst = 0;
    for (auto j : ps[part]) worst = std::max(worst, rel[j]);
    out[9 * part] = std::cos(worst);
    const std::vector<double>* sig[] = {&x, &y, &z, &dev};
    for (int k = 0; k < 4; ++k) {
      const auto [lo, hi] = bands(pick(*sig[k], ps[part]));
      out[9 * part + 1 + 2 * k] = lo;
      out[9 * part + 2 + 2 * k] = hi;
    }
  }
  out[27] = *std::max_element(rel.begin(), rel.end());
  return out;
}

inline Eigen::VectorXd phi_object_env(const tpp::Scene& s, const tpp::Trajectory& t, double cap) {
  const std::size_t n = t.size();
  const Vec3 h = s.manipulated().box.half_extents;
  std::vector<double> vert(n), side(n), table(n), goal(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec3 p = fk(s.arm, t.waypoints[j]).wrist;
    const double bottom = p.z() - h.z(), top = p.z() + h.z();
    double support = s.table_height;
    double best_side = cap;
    for (const auto& o : s.objects) {
      if (o.id == s.manipulated_id) continue;
      const Vec3 lo = o.box.center - o.box.half_extents, hi = o.box.center + o.box.half_extents;
      if (p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y() && hi.z() <= bottom)
        support = std::max(support, hi.z());
      if (std::min(top, hi.z()) > std::max(bottom, lo.z())) {
        const double gx = interval_gap(p.x() - h.x(), p.x() + h.x(), lo.x(), hi.x());
        const double gy = interval_gap(p.y() - h.y(), p.y() + h.y(), lo.y(), hi.y());
        best_side = std::min(best_side, std::sqrt(gx * gx + gy * gy));
      }
    }
    vert[j] = std::min(cap, std::max(0.0, bottom - support));
    side[j] = best_side;
    table[j] = p.z() - s.table_height;
    goal[j] = (p - s.goal).norm();
  }
  Eigen::VectorXd out(20);
  const auto ps = parts(n);
  for (int part = 0; part < 3; ++part) {
    const auto mn = [&](const std::vector<double>& v) {
      double m = std::numeric_limits<double>::infinity();
      for (auto j : ps[part]) m = std::min(m, v[j]);
      return m;
    };
    out[4 * part] = mn(vert);
    out[4 * part + 1] = mn(side);
    out[4 * part + 2] = mn(table);
    out[4 * part + 3] = mn(goal);
  }
  double sv = 0, ss = 0;
  for (std::size_t j = 0; j < n; ++j) {
    sv += vert[j];
    ss += side[j];
  }
  out[12] = sv / static_cast<double>(n);
  out[13] = ss / static_cast<double>(n);
  for (int part = 0; part < 3; ++part) {
    const auto [lo, hi] = bands(pick(vert, ps[part]));
    out[14 + 2 * part] = lo;
    out[15 + 2 * part] = hi;
  }
  return out;
}

/// Published scaling: metres / 2, radians / pi, object-object sums / N.
inline tpp::FeatureVector extract(const tpp::Scene& s, const tpp::Trajectory& t, double tau, double cap) {
  const double n = static_cast<double>(t.size());
  tpp::FeatureVector f;
  f.phi_O = oracle::phi_o(s, oracle::edges(s, t, tau));
  for (Eigen::Index i = 0; i < f.phi_O.size(); ++i) f.phi_O[i] = f.phi_O[i] / n * ((i % 4 == 3) ? 1.0 : 0.5);
  Eigen::VectorXd robot = oracle::phi_robot(s, t);
  Eigen::VectorXd object = oracle::phi_object(s, t);
  Eigen::VectorXd env = oracle::phi_object_env(s, t, cap);
  for (int part = 0; part < 3; ++part)
    for (int k = 0; k < 3; ++k) {
      robot[9 * part + 3 * k] *= 0.5;
      robot[9 * part + 3 * k + 1] /= std::numbers::pi;
      robot[9 * part + 3 * k + 2] *= 0.5;
    }
  object[27] /= std::numbers::pi;
  for (int i = 0; i < 14; ++i) env[i] *= 0.5;
  f.phi_E.resize(75);
  f.phi_E << robot, object, env;
  return f;
}

/// Carried box at the wrist must stay above the table, inside the joint
/// limits and out of every obstacle's open interior.
inline bool config_free(const tpp::Scene& s, const tpp::ArmConfig& c) {
  for (int k = 0; k < 4; ++k)
    if (c.q[k] < s.arm.joint_limits[k].lo || c.q[k] > s.arm.joint_limits[k].hi) return false;
  const Vec3 w = fk(s.arm, c).wrist;
  const Vec3 h = s.manipulated().box.half_extents;
  if (w.z() - h.z() < s.table_height) return false;
  for (const auto& o : s.objects) {
    if (o.id == s.manipulated_id) continue;
    const Vec3 d = (w - o.box.center).cwiseAbs() - (h + o.box.half_extents);
    if (d.maxCoeff() < 0.0) return false;
  }
  return true;
}

/// Dense straight-line check between consecutive waypoints.
inline bool path_free(const tpp::Scene& s, const tpp::Trajectory& t, double step) {
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    const Eigen::Vector4d a = t.waypoints[j].q, b = t.waypoints[j + 1].q;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / step)));
    for (int i = 0; i <= pieces; ++i)
      if (!config_free(s, tpp::ArmConfig(Eigen::Vector4d(a + (b - a) * (static_cast<double>(i) / pieces)))))
        return false;
  }
  return !t.waypoints.empty();
}

/// Small random scene with boxes placed next to the path so that edges,
/// supports and horizontal neighbours all occur.
struct Toy {
  tpp::Scene scene;
  tpp::Trajectory trajectory;
};

inline Toy random_toy(std::uint64_t seed, std::size_t waypoints = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto U = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  Toy toy;
  tpp::Scene& s = toy.scene;
  s.table_height = 0.7;
  s.goal = Vec3(0.5, 0.3, 0.9);
  const std::size_t m = s.attributes.size();
  const auto& lim = s.arm.joint_limits;

  const std::size_t n = waypoints ? waypoints : 3 + static_cast<std::size_t>(u(rng) * 28);
  tpp::ArmConfig a(U(-1.0, 1.0), U(-0.6, 0.3), U(-0.8, 0.6), U(-0.5, 0.5));
  tpp::ArmConfig b(U(-1.0, 1.0), U(-0.6, 0.3), U(-0.8, 0.6), U(-0.5, 0.5));
  for (std::size_t j = 0; j < n; ++j) {
    const double f = n == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(n - 1);
    Eigen::Vector4d q = (1 - f) * a.q + f * b.q;
    for (int k = 0; k < 4; ++k) q[k] = std::clamp(q[k] + U(-0.05, 0.05), lim[k].lo, lim[k].hi);
    toy.trajectory.waypoints.emplace_back(q);
  }
  s.start_config = toy.trajectory.waypoints.front();

  tpp::SceneObject held;
  held.id = "held";
  held.box = tpp::Box{fk(s.arm, s.start_config).wrist, Vec3(U(0.02, 0.06), U(0.02, 0.06), U(0.02, 0.06))};
  held.attributes.assign(m, 0);
  for (std::size_t q = 0; q < m; ++q) held.attributes[q] = u(rng) < 0.4;
  s.objects.push_back(held);
  s.manipulated_id = "held";

  const std::size_t boxes = 1 + static_cast<std::size_t>(u(rng) * 4);
  for (std::size_t i = 0; i < boxes; ++i) {
    const Vec3 anchor = fk(s.arm, toy.trajectory.waypoints[static_cast<std::size_t>(u(rng) * n) % n]).wrist;
    tpp::SceneObject o;
    o.id = "box" + std::to_string(i);
    const Vec3 half(U(0.03, 0.12), U(0.03, 0.12), U(0.03, 0.1));
    Vec3 c = anchor + Vec3(U(-0.15, 0.15), U(-0.15, 0.15), U(-0.25, 0.05));
    if (u(rng) < 0.5) c.z() = s.table_height + half.z();  // resting on the table
    o.box = tpp::Box{c, half};
    o.attributes.assign(m, 0);
    for (std::size_t p = 0; p < m; ++p) o.attributes[p] = u(rng) < 0.4;
    s.objects.push_back(o);
  }
  return toy;
}

}  // namespace oracle
