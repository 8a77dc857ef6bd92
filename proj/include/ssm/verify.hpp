#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ssm/bundled_scenarios.hpp"
#include "ssm/emit.hpp"
#include "ssm/scenario.hpp"
#include "ssm/simulation.hpp"

namespace ssm {

/// One acceptance criterion's verdict.
struct CriterionOutcome {
  int number = 0;
  std::string title;
  bool passed = false;
  std::string detail;
};

namespace verify_detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

struct Pair {
  std::optional<double> ttc1d;
  std::optional<double> full3d;
};

inline Pair evaluate_at_zero(const char* text, double* runtime_s) {
  const auto start = std::chrono::steady_clock::now();
  Simulator sim(load_scenario(text));
  Pair pair;
  for (const auto& q : sim.scenario().queries) {
    const auto out = sim.evaluate_query(
        q, q.ssm == SsmType::Circles ? RunMethod::Numeric : RunMethod::Analytic);
    const auto& result = q.ssm == SsmType::Circles ? out.numeric : out.analytic;
    if (q.id == "ttc1d" && result) pair.ttc1d = result->t_c_star;
    if (q.id == "full3d" && result) pair.full3d = result->t_c_star;
  }
  if (runtime_s) *runtime_s = seconds_since(start);
  return pair;
}

/// |1D - 3D| at the first evaluation time where the 3D forecast drops to
/// 1.5 s or below.
inline std::optional<double> threshold_error(const char* text) {
  const Scenario scenario = load_scenario(text);
  const RunRecord record = run(scenario, RunMethod::Numeric);
  for (const auto& eval : record.evaluations) {
    std::optional<double> tc3, tc1;
    for (const auto& q : eval.outcomes) {
      if (!q.numeric || !q.numeric->t_c_star) continue;
      if (q.query_id == "full3d") tc3 = q.numeric->t_c_star;
      if (q.query_id == "ttc1d") tc1 = q.numeric->t_c_star;
    }
    if (tc3 && *tc3 <= 1.5) {
      if (!tc1) return std::nullopt;
      return std::abs(*tc1 - *tc3);
    }
  }
  return std::nullopt;
}

// Tolerance comparison with an epsilon guard so exact-decimal boundary hits
// (|x - target| == tol in real arithmetic) are not flipped by the binary
// representation of the target.
inline bool within(double x, double target, double tol) {
  return std::abs(x - target) <= tol * (1.0 + 1e-9);
}

inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace verify_detail

/// Criterion 1: car-following snapshot values at T_r = 0.
inline CriterionOutcome criterion_car_following_snapshot() {
  using namespace verify_detail;
  CriterionOutcome out{1, "experiment 3 car-following at T_r=0", false, ""};
  double runtime = 0.0;
  const Pair pair = evaluate_at_zero(bundled::kExperiment3CarFollowing, &runtime);
  std::ostringstream detail;
  if (!pair.ttc1d || !pair.full3d) {
    out.detail = "missing t_c*";
    return out;
  }
  detail << "1D TTC " << fmt(*pair.ttc1d) << " (want 17.38 +/- 0.02), 3D "
         << fmt(*pair.full3d) << " (want 6.22 +/- 0.03), runtime "
         << fmt(runtime) << " s";
  out.passed = within(*pair.ttc1d, 17.38, 0.02) &&
               within(*pair.full3d, 6.22, 0.03) && runtime < 5.0;
  out.detail = detail.str();
  return out;
}

/// Criterion 2: merging snapshot values at T_r = 0.
inline CriterionOutcome criterion_merging_snapshot() {
  using namespace verify_detail;
  CriterionOutcome out{2, "experiment 3 merging at T_r=0", false, ""};
  double runtime = 0.0;
  const Pair pair = evaluate_at_zero(bundled::kExperiment3Merging, &runtime);
  if (!pair.ttc1d || !pair.full3d) {
    out.detail = "missing t_c*";
    return out;
  }
  std::ostringstream detail;
  detail << "1D TTC " << fmt(*pair.ttc1d) << " (want 20.18 +/- 0.02), 3D "
         << fmt(*pair.full3d) << " (want 4.66 +/- 0.03), runtime "
         << fmt(runtime) << " s";
  out.passed = within(*pair.ttc1d, 20.18, 0.02) &&
               within(*pair.full3d, 4.66, 0.03) && runtime < 5.0;
  out.detail = detail.str();
  return out;
}

/// Criterion 3: 1D-vs-3D gap at the 1.5 s threshold.
inline CriterionOutcome criterion_threshold_errors() {
  using namespace verify_detail;
  CriterionOutcome out{3, "experiment 3 threshold-error claim", false, ""};
  const auto cf = threshold_error(bundled::kExperiment3CarFollowing);
  const auto mg = threshold_error(bundled::kExperiment3Merging);
  std::ostringstream detail;
  detail << "car-following |1D-3D| "
         << (cf ? fmt(*cf) : std::string("n/a")) << " (want > 0.25), merging "
         << (mg ? fmt(*mg) : std::string("n/a")) << " (want > 0.2)";
  out.passed = cf && *cf > 0.25 && mg && *mg > 0.2;
  out.detail = detail.str();
  return out;
}

/// Criterion 4: experiment 1 linearization error profile and runtime.
inline CriterionOutcome criterion_experiment1_errors() {
  using namespace verify_detail;
  CriterionOutcome out{4, "experiment 1 analytic-vs-numeric error", false, ""};
  const auto start = std::chrono::steady_clock::now();
  const Scenario scenario = load_scenario(bundled::kExperiment1);
  const RunRecord record = run(scenario, RunMethod::Both);
  const double runtime = seconds_since(start);

  double e0 = -1.0;
  double window_end = 0.0;
  for (const auto& eval : record.evaluations) {
    const auto& q = eval.outcomes.front();
    if (q.e_tc) window_end = eval.t_r;
    if (eval.t_r == 0.0 && q.e_tc) e0 = *q.e_tc;
  }
  bool tail_ok = true;
  double tail_worst = 0.0;
  for (const auto& eval : record.evaluations) {
    if (eval.t_r < 0.75 * window_end) continue;
    const auto& q = eval.outcomes.front();
    if (!q.e_tc) {
      tail_ok = false;
      break;
    }
    tail_worst = std::max(tail_worst, *q.e_tc);
  }
  tail_ok = tail_ok && tail_worst < 0.05;

  std::ostringstream detail;
  detail << "e(0) " << fmt(e0) << " (want < 0.25), final-quarter max e "
         << fmt(tail_worst) << " (want < 0.05), runtime " << fmt(runtime)
         << " s (want < 30)";
  out.passed = e0 >= 0.0 && e0 < 0.25 && tail_ok && runtime < 30.0;
  out.detail = detail.str();
  return out;
}

/// Criterion 5: experiment 2 boundary-collision error at T_r = 0.
inline CriterionOutcome criterion_experiment2_error() {
  using namespace verify_detail;
  CriterionOutcome out{5, "experiment 2 analytic-vs-numeric error", false, ""};
  Simulator sim(load_scenario(bundled::kExperiment2));
  std::optional<double> e0;
  for (const auto& q : sim.scenario().queries) {
    if (q.id != "outer") continue;
    const auto result = sim.evaluate_query(q, RunMethod::Both);
    e0 = result.e_tc;
  }
  std::ostringstream detail;
  detail << "e(0) " << (e0 ? fmt(*e0) : std::string("n/a")) << " (want < 0.15)";
  out.passed = e0 && *e0 < 0.15;
  out.detail = detail.str();
  return out;
}

/// Criterion 6: experiment 4 qualitative risk sequence over the snapshots.
inline CriterionOutcome criterion_experiment4_sequence() {
  using namespace verify_detail;
  CriterionOutcome out{6, "experiment 4 active-risk sequence", false, ""};
  const Scenario scenario = load_scenario(bundled::kExperiment4);
  const RunRecord record = run(scenario, RunMethod::Numeric);

  const std::vector<std::set<std::string>> expected = {
      {"obs"},          {"obs"},          {"veh", "upper"}, {"veh", "upper"},
      {"lower"},        {"lower"},        {},               {}};
  std::ostringstream detail;
  if (record.snapshots.size() != expected.size()) {
    out.detail = "snapshot count mismatch";
    return out;
  }
  bool sets_ok = true;
  std::vector<std::map<std::string, double>> risks(record.snapshots.size());
  for (std::size_t i = 0; i < record.snapshots.size(); ++i) {
    std::set<std::string> active;
    for (const auto& q : record.snapshots[i].record.outcomes) {
      if (q.numeric && q.numeric->t_c_star) {
        active.insert(q.query_id);
        risks[i][q.query_id] = *q.numeric->t_c_star;
      }
    }
    detail << "T_r=" << record.snapshots[i].t_r << " {";
    for (const auto& id : active) detail << id << " ";
    detail << "} ";
    if (active != expected[i]) sets_ok = false;
  }
  // within each matched pair the later snapshot is strictly closer
  bool pairs_ok = true;
  for (std::size_t i = 0; i + 1 < record.snapshots.size(); i += 2) {
    for (const auto& [id, tc] : risks[i]) {
      const auto later = risks[i + 1].find(id);
      if (later != risks[i + 1].end() && !(later->second < tc)) pairs_ok = false;
    }
  }
  out.passed = sets_ok && pairs_ok;
  out.detail = detail.str();
  return out;
}

/// Criterion 7: the property suite (oracle-checked invariants).
inline CriterionOutcome criterion_property_suite() {
  using namespace verify_detail;
  CriterionOutcome out{7, "property suite", false, ""};
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool ok = true;

  // Jacobians against central finite differences, 100 points per family.
  {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    ModelParams params;
    params.wheelbase = 2.4;
    double worst = 0.0;
    for (ModelKind kind :
         {ModelKind::ConstantVelocity1D, ModelKind::DoubleIntegrator1D,
          ModelKind::Bicycle2D, ModelKind::Longitudinal3D, ModelKind::LateralPath}) {
      for (int trial = 0; trial < 100; ++trial) {
        Vector x(state_dimension(kind)), u(control_dimension(kind));
        for (int i = 0; i < x.size(); ++i) x(i) = 10.0 * unit(rng);
        for (int i = 0; i < u.size(); ++i) u(i) = unit(rng);
        if (kind == ModelKind::Bicycle2D) {
          u(0) = 0.4 * unit(rng);
          x(3) = 5.0 + 5.0 * unit(rng);
        } else if (kind == ModelKind::Longitudinal3D) {
          x(0) = 6.0 + 5.0 * unit(rng);
          u(0) = 300.0 * (1.0 + unit(rng));
          u(1) = 0.05 * unit(rng);
        } else if (kind == ModelKind::LateralPath) {
          x(1) = 2.0 * unit(rng);
          x(2) = 0.4 * unit(rng);
          u(0) = 0.4 * unit(rng);
          u(1) = 5.0 + 4.0 * unit(rng);
          u(2) = 0.05 * unit(rng);
        }
        const LtiSystem sys = linearize(kind, x, u, params);
        const double step = 1e-6;
        for (int j = 0; j < x.size() + u.size(); ++j) {
          Vector xp = x, xm = x, up = u, um = u;
          if (j < x.size()) {
            xp(j) += step;
            xm(j) -= step;
          } else {
            up(j - x.size()) += step;
            um(j - x.size()) -= step;
          }
          const Vector col = (model_rhs(kind, xp, up, params) -
                              model_rhs(kind, xm, um, params)) /
                             (2.0 * step);
          for (int i = 0; i < x.size(); ++i) {
            const double want = col(i);
            const double got = j < x.size() ? sys.a(i, j) : sys.b(i, j - x.size());
            const double diff = std::abs(got - want);
            if (diff > 1e-9) {
              worst = std::max(worst, diff / std::max(std::abs(want), 1e-9));
            }
          }
        }
      }
    }
    detail << "jacobian rel err " << worst << "; ";
    ok = ok && worst < 1e-6;
  }

  // Analytic trajectory equals RK4 on a linear model.
  {
    Matrix a(2, 2), b(2, 1);
    a << 0, 1, 0, 0;
    b << 0, 1;
    const LtiSystem sys(a, b, Vector::Zero(2));
    Vector x0(2);
    x0 << 1.0, 3.0;
    PiecewiseConstantControl u;
    u.add_piece(0.0, 2.0);
    u.add_piece(0.7, -1.5);
    const auto analytic = solve_lti(sys, x0, u, 2.0);
    const auto rhs = [](const Vector& x, const Vector& uu) {
      Vector d(2);
      d << x(1), uu(0);
      return d;
    };
    const auto sampled = rk4_integrate(rhs, x0, u, 1e-4, 20000);
    double worst = 0.0;
    for (int l = 0; l <= sampled.steps(); l += 100) {
      const double t = sampled.time_at(l);
      worst = std::max(worst, (analytic.state(t) - sampled.states[l])
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    detail << "linear-model analytic-vs-rk4 " << worst << "; ";
    ok = ok && worst < 1e-6;
  }

  // DeltaV momentum conservation.
  {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> mass(100.0, 40000.0);
    std::uniform_real_distribution<double> vel(-40.0, 40.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const double mi = mass(rng), mj = mass(rng);
      const auto [dvi, dvj] = delta_v(mi, mj, vel(rng), vel(rng));
      worst = std::max(worst, std::abs(mi * dvi + mj * dvj) /
                                  std::max(1.0, std::abs(mi * dvi)));
    }
    detail << "momentum residual " << worst << "; ";
    ok = ok && worst < 1e-12;
  }

  // Frenet round trips on straight, arcs, and a polyline.
  {
    std::mt19937 rng(20240601);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<RoadGeometry> roads;
    {
      RoadGeometry r;
      r.path = ArcPath{{0, 0}, 0.0, 0.0, 100.0};
      r.width = 6.0;
      roads.push_back(r);
      r.path = ArcPath{{0, 0}, 0.0, 0.01, 200.0};
      roads.push_back(r);
      r.path = ArcPath{{0, 0}, 0.0, -0.02, 150.0};
      roads.push_back(r);
      PolylinePath poly;
      double x = 0, y = 0, heading = 0;
      poly.points.push_back({0, 0});
      for (int i = 0; i < 10; ++i) {
        heading += 0.06 * (unit(rng) - 0.5);
        x += 30.0 * std::cos(heading);
        y += 30.0 * std::sin(heading);
        poly.points.push_back({x, y});
      }
      r.path = poly;
      r.width = 7.0;
      roads.push_back(r);
    }
    double worst = 0.0;
    for (const auto& road : roads) {
      std::vector<double> vertex_s;
      if (const auto* poly = std::get_if<PolylinePath>(&road.path)) {
        double acc = 0.0;
        for (std::size_t i = 1; i + 1 < poly->points.size(); ++i) {
          acc += (poly->points[i] - poly->points[i - 1]).norm();
          vertex_s.push_back(acc);
        }
      }
      const double kappa = std::holds_alternative<ArcPath>(road.path)
                               ? std::abs(std::get<ArcPath>(road.path).curvature)
                               : 0.0;
      const double length = road.length();
      for (int trial = 0; trial < 250; ++trial) {
        PathCoordinates pc;
        do {
          pc.s = (0.05 + 0.9 * unit(rng)) * length;
        } while (std::any_of(vertex_s.begin(), vertex_s.end(), [&](double vs) {
          return std::abs(pc.s - vs) < 1.0;
        }));
        pc.e_cg = (2.0 * unit(rng) - 1.0) *
                  (kappa > 0.0 ? std::min(3.0, 0.5 / kappa) : 3.0);
        pc.theta_e = (2.0 * unit(rng) - 1.0) * 1.2;
        const CartesianPose pose = path_to_cartesian(pc, road);
        const PathCoordinates back = cartesian_to_path(pose, road);
        worst = std::max({worst, std::abs(back.s - pc.s),
                          std::abs(back.e_cg - pc.e_cg),
                          std::abs(back.theta_e - pc.theta_e)});
      }
    }
    detail << "frenet round-trip " << worst << "; ";
    ok = ok && worst < 1e-9;
  }

  // Companion-matrix roots on constructed polynomials.
  {
    std::mt19937 rng(20240311);
    std::uniform_real_distribution<double> root_dist(-10.0, 10.0);
    std::uniform_int_distribution<int> degree_dist(1, 6);
    double worst = 0.0;
    int done = 0;
    while (done < 1000) {
      const int degree = degree_dist(rng);
      std::vector<double> expected(degree);
      bool separated = true;
      for (int i = 0; i < degree; ++i) {
        expected[i] = root_dist(rng);
        for (int j = 0; j < i; ++j) {
          if (std::abs(expected[i] - expected[j]) < 0.05) separated = false;
        }
      }
      if (!separated) continue;
      ++done;
      std::sort(expected.begin(), expected.end());
      std::vector<double> coeffs{1.0};
      for (double r : expected) {
        std::vector<double> next(coeffs.size() + 1, 0.0);
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
          next[i + 1] += coeffs[i];
          next[i] -= r * coeffs[i];
        }
        coeffs = next;
      }
      const auto got = real_polynomial_roots(coeffs);
      if (got.size() != expected.size()) {
        worst = 1.0;
        break;
      }
      for (int i = 0; i < degree; ++i) {
        worst = std::max(worst, std::abs(got[i] - expected[i]));
      }
    }
    detail << "polynomial roots " << worst << "; ";
    ok = ok && worst < 1e-7;
  }

  // RK4 order-4 self-convergence ratio.
  {
    ModelParams params;
    params.wheelbase = 2.0;
    const auto rhs = [&](const Vector& x, const Vector& u) {
      return rhs_bicycle2d(x, u, params.wheelbase);
    };
    const Vector x0 = (Vector(4) << 0, 0, 0, 20).finished();
    const auto u =
        PiecewiseConstantControl::constant((Vector(2) << 0.5, 0.5).finished());
    auto end_state = [&](double h) {
      const int steps = static_cast<int>(std::llround(2.0 / h));
      return rk4_integrate(rhs, x0, u, 2.0 / steps, steps).states.back();
    };
    const Vector reference = end_state(1e-4);
    const double ratio =
        (end_state(0.05) - reference).cwiseAbs().maxCoeff() /
        (end_state(0.005) - reference).cwiseAbs().maxCoeff();
    detail << "rk4 ratio " << ratio << "; ";
    ok = ok && ratio > 5e3 && ratio < 2e4;
  }

  const double runtime = seconds_since(start);
  detail << "runtime " << fmt(runtime) << " s (want < 60)";
  out.passed = ok && runtime < 60.0;
  out.detail = detail.str();
  return out;
}

/// Criterion 8: closed-form equivalences of the conventional SSMs.
inline CriterionOutcome criterion_closed_form_equivalences() {
  using namespace verify_detail;
  CriterionOutcome out{8, "closed-form equivalences", false, ""};
  std::ostringstream detail;
  bool ok = true;

  {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> pos(-50.0, 50.0);
    std::uniform_real_distribution<double> vel(0.0, 30.0);
    std::uniform_real_distribution<double> len(1.0, 6.0);
    bool exact = true;
    for (int trial = 0; trial < 1000; ++trial) {
      const double p_follow = pos(rng);
      const double p_lead = p_follow + pos(rng);
      const double v_lead = vel(rng), v_follow = vel(rng);
      const double l = len(rng);
      const SsmResult r = ttc(p_lead, p_follow, v_lead, v_follow, l);
      const double gap = p_lead - p_follow - l;
      const double closing = v_follow - v_lead;
      if (gap <= 0.0) {
        exact = exact && r.t_c_star && *r.t_c_star == 0.0;
      } else if (closing <= 0.0) {
        exact = exact && !r.t_c_star;
      } else {
        exact = exact && r.t_c_star && *r.t_c_star == gap / closing;
      }
    }
    detail << "ttc exact " << (exact ? "yes" : "NO") << "; ";
    ok = ok && exact;
  }

  {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> vel(0.0, 35.0);
    std::uniform_real_distribution<double> gap(0.1, 80.0);
    std::uniform_real_distribution<double> decel(2.0, 9.0);
    std::uniform_real_distribution<double> delay(0.0, 2.5);
    bool signs = true;
    for (int trial = 0; trial < 1000; ++trial) {
      const double v_lead = vel(rng), v_follow = vel(rng);
      const double s = gap(rng), d = decel(rng), td = delay(rng);
      const RcriFlag f = rcri_flag(v_lead, v_follow, s, d, td);
      const double formula = s - v_follow * td - v_follow * v_follow / (2 * d) +
                             v_lead * v_lead / (2 * d);
      signs = signs && (f.level == RcriLevel::Dangerous) == (formula <= 0.0);
    }
    detail << "rcri sign matches " << (signs ? "yes" : "NO") << "; ";
    ok = ok && signs;
  }

  {
    std::mt19937 rng(20240815);
    std::uniform_real_distribution<double> vel(0.0, 35.0);
    std::uniform_real_distribution<double> gap(0.5, 60.0);
    std::uniform_real_distribution<double> decel(2.0, 9.0);
    std::uniform_real_distribution<double> delay(0.0, 2.5);
    const double horizon = 25.0;
    double worst = 0.0;
    bool consistent = true;
    for (int trial = 0; trial < 200; ++trial) {
      const double v_lead = vel(rng), v_follow = vel(rng);
      const double s = gap(rng), d = decel(rng), td = delay(rng);
      const SsmResult r = rcri_time_to_collision(v_lead, v_follow, s, d, td, horizon);
      const auto trajs = rcri_trajectories(v_lead, v_follow, s, d, td, horizon);
      // dense piecewise-gap scan at 1e-4 s
      double scanned = -1.0;
      double prev = trajs.lead.value(0, 0.0) - trajs.follow.value(0, 0.0);
      if (prev <= 0.0) scanned = 0.0;
      const int n = static_cast<int>(horizon / 1e-4);
      for (int i = 1; scanned < 0.0 && i <= n; ++i) {
        const double t = i * 1e-4;
        const double g = trajs.lead.value(0, t) - trajs.follow.value(0, t);
        if (g <= 0.0) scanned = (t - 1e-4) + 1e-4 * prev / (prev - g);
        prev = g;
      }
      if (scanned < 0.0) {
        consistent = consistent && !r.t_c_star;
      } else if (!r.t_c_star) {
        consistent = false;
      } else {
        worst = std::max(worst, std::abs(*r.t_c_star - scanned));
      }
    }
    detail << "rcri vs dense scan max " << worst << " (want < 2e-4), consistent "
           << (consistent ? "yes" : "NO");
    ok = ok && consistent && worst < 2e-4;
  }

  out.passed = ok;
  out.detail = detail.str();
  return out;
}

/// Runs all eight acceptance criteria in order.
inline std::vector<CriterionOutcome> run_acceptance_criteria() {
  return {criterion_car_following_snapshot(), criterion_merging_snapshot(),
          criterion_threshold_errors(),       criterion_experiment1_errors(),
          criterion_experiment2_error(),      criterion_experiment4_sequence(),
          criterion_property_suite(),         criterion_closed_form_equivalences()};
}

}  // namespace ssm
