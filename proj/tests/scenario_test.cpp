#include "ssm/scenario.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ssm/bundled_scenarios.hpp"
#include "ssm/emit.hpp"
#include "ssm/simulation.hpp"

namespace ssm {
namespace {

const char* kTwoCarText = R"(# ssm-scenario v1
[vehicle.lead]
model = double_integrator
state = 30 5
control = 0
radius = 1.3

[vehicle.chase]
model = double_integrator
state = 0 10
control = 0
radius = 1.3

[query.gap]
type = vehicle
i = chase
j = lead

[sim]
duration = 2
period = 0.1
horizon = 10
step = 0.001
)";

TEST(LoadScenario, ParsesTwoCarScenario) {
  const Scenario s = load_scenario(kTwoCarText);
  EXPECT_FALSE(s.road);
  ASSERT_EQ(s.vehicles.size(), 2u);
  EXPECT_EQ(s.vehicles[0].id, "lead");
  EXPECT_EQ(s.vehicles[0].model, ModelKind::DoubleIntegrator1D);
  EXPECT_EQ(s.vehicles[0].initial_state(0), 30.0);
  ASSERT_EQ(s.queries.size(), 1u);
  EXPECT_EQ(s.queries[0].query.kind, CollisionQuery::Kind::VehicleVehicle);
  EXPECT_EQ(s.sim.duration, 2.0);
}

TEST(LoadScenario, EmptyVehicleListFails) {
  EXPECT_THROW(load_scenario("[sim]\nduration = 1\n"), ScenarioError);
}

TEST(LoadScenario, DuplicateIdNamesTheOffender) {
  const std::string text = R"([vehicle.a]
model = cv
state = 0
control = 1

[vehicle.a]
model = cv
state = 1
control = 1

[sim]
duration = 1
)";
  try {
    load_scenario(text);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
    EXPECT_GT(e.line, 1);
  }
}

TEST(LoadScenario, UnknownModelFamilyIsLinePrecise) {
  const std::string text = "[vehicle.a]\nmodel = hovercraft\nstate = 0\ncontrol = 1\n[sim]\nduration = 1\n";
  try {
    load_scenario(text);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("hovercraft"), std::string::npos);
  }
}

TEST(LoadScenario, QueryReferencingUnknownIdFails) {
  const std::string text = R"([vehicle.a]
model = cv
state = 0
control = 5

[query.q]
type = vehicle
i = a
j = ghost

[sim]
duration = 1
)";
  EXPECT_THROW(load_scenario(text), ScenarioError);
}

TEST(LoadScenario, MissingLongitudinalParameterFails) {
  const std::string text = R"([vehicle.a]
model = composed_bicycle
state = 0 0 0 5
control = 0 100 0
mass = 1500
rho = 1.2
c_d = 0.25
s_front = 2
r_whl = 0.25

[sim]
duration = 1
)";
  try {
    load_scenario(text);
    FAIL() << "expected ScenarioError about f_roll";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("f_roll"), std::string::npos);
  }
}

TEST(LoadScenario, MultiCircleGeometry) {
  const std::string text = R"([vehicle.a]
model = bicycle
state = 0 0 0 5
control = 0 0
circles = -1.2 0.9; 1.2 0.9

[sim]
duration = 1
)";
  const Scenario s = load_scenario(text);
  ASSERT_EQ(s.vehicles[0].geometry.circles.size(), 2u);
  EXPECT_EQ(s.vehicles[0].geometry.circles[0].offset, -1.2);
  EXPECT_EQ(s.vehicles[0].geometry.circles[1].radius, 0.9);
  // default 1D length falls back to twice the largest radius
  EXPECT_DOUBLE_EQ(s.vehicles[0].geometry.body_length, 1.8);
}

TEST(LoadScenario, ControlDimensionChecked) {
  const std::string text = R"([vehicle.a]
model = bicycle
state = 0 0 0 5
control = 0

[sim]
duration = 1
)";
  EXPECT_THROW(load_scenario(text), ScenarioError);
}

TEST(LoadScenario, BoundaryQueryNeedsRoad) {
  const std::string text = R"([vehicle.a]
model = bicycle
state = 0 0 0 5
control = 0 0

[query.b]
type = boundary
i = a
side = 1

[sim]
duration = 1
)";
  EXPECT_THROW(load_scenario(text), ScenarioError);
}

TEST(SchemaText, MentionsVersionAndSections) {
  const std::string schema = scenario_schema_text();
  EXPECT_NE(schema.find(kScenarioFormatVersion), std::string::npos);
  for (const char* token : {"[road]", "[vehicle.<id>]", "[obstacle.<id>]",
                            "[query.<id>]", "[sim]"}) {
    EXPECT_NE(schema.find(token), std::string::npos) << token;
  }
}

TEST(Run, DeterministicCsvBytes) {
  const Scenario s = load_scenario(kTwoCarText);
  const RunRecord r1 = run(s, RunMethod::Both);
  const RunRecord r2 = run(s, RunMethod::Both);
  EXPECT_EQ(csv_text(r1), csv_text(r2));
  const std::string csv = csv_text(r1);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "T_r,query_id,method,t_c_star,n_roots,e_tc_star");
  // 21 evaluation times, 2 rows per query (analytic + numeric)
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 21 * 2);
}

TEST(Run, CsvRowShape) {
  const Scenario s = load_scenario(kTwoCarText);
  const RunRecord record = run(s, RunMethod::Analytic);
  const std::string csv = csv_text(record);
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  // closing speed 5 on a 27.4 m effective gap: circles touch at 5.48 and
  // separate again at 6.52, so two roots
  EXPECT_EQ(first, "0.000000,gap,analytic,5.480000,2,");
}

// For a linear world under frozen controls the forecast is exact, so t_c*
// falls by exactly the evaluation period per step.
TEST(Run, RollingHorizonSlopeMinusOne) {
  const Scenario s = load_scenario(kTwoCarText);
  const RunRecord record = run(s, RunMethod::Analytic);
  std::vector<double> t_c;
  for (const auto& eval : record.evaluations) {
    ASSERT_EQ(eval.outcomes.size(), 1u);
    ASSERT_TRUE(eval.outcomes[0].analytic);
    ASSERT_TRUE(eval.outcomes[0].analytic->t_c_star);
    t_c.push_back(*eval.outcomes[0].analytic->t_c_star);
  }
  for (std::size_t k = 1; k < t_c.size(); ++k) {
    EXPECT_NEAR(t_c[k - 1] - t_c[k], s.sim.period, 1e-6);
  }
}

TEST(Run, SnapshotEmissionProducesFiles) {
  std::string text = kTwoCarText;
  text += "\n";
  // re-parse with snapshot request
  text.replace(text.find("duration = 2"), 12, "duration = 1");
  const std::string with_snap = text + "";
  Scenario s = load_scenario(with_snap);
  s.sim.snapshots = {0.5};
  const RunRecord record = run(s, RunMethod::Numeric);
  ASSERT_EQ(record.snapshots.size(), 1u);
  const std::string snap_text = snapshot_text(s, record.snapshots[0]);
  EXPECT_NE(snap_text.find("# ssm-snapshot v1"), std::string::npos);
  EXPECT_NE(snap_text.find("[vehicle.lead]"), std::string::npos);
  EXPECT_NE(snap_text.find("[risk.gap]"), std::string::npos);
  const std::string svg = snapshot_svg(s, record.snapshots[0]);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("circle"), std::string::npos);
}

// The shipped .cfg files and the embedded copies the verifier runs must
// stay byte-identical.
TEST(BundledScenarios, FilesMatchEmbeddedTexts) {
  for (const auto& bundled : bundled::kAll) {
    const std::string path = std::string(SSM_SCENARIO_DIR) + "/" + bundled.file_name;
    std::ifstream in(path, std::ios::binary);
    ASSERT_TRUE(in) << path;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    EXPECT_EQ(buffer.str(), bundled.text) << bundled.name;
  }
}

TEST(BundledScenarios, AllParseAndValidate) {
  for (const auto& bundled : bundled::kAll) {
    EXPECT_NO_THROW(load_scenario(bundled.text)) << bundled.name;
  }
}

TEST(BundledScenarios, Experiment1MatchesItsParameterTable) {
  const Scenario s = load_scenario(bundled::kExperiment1);
  ASSERT_EQ(s.vehicles.size(), 2u);
  const auto& v1 = s.vehicle("1");
  const auto& v2 = s.vehicle("2");
  EXPECT_EQ(v1.initial_state(0), 8.0);
  EXPECT_EQ(v1.initial_state(1), 2.0);
  EXPECT_DOUBLE_EQ(v1.initial_state(2), M_PI / 4);
  EXPECT_EQ(v1.initial_state(3), 10.0);
  EXPECT_EQ(v1.schedule.value(0.0)(0), 0.01);
  EXPECT_EQ(v1.schedule.value(0.0)(1), -0.1);
  EXPECT_EQ(v1.geometry.wheelbase, 2.5);
  EXPECT_EQ(v1.geometry.circles[0].radius, 1.5);
  EXPECT_EQ(v2.initial_state(0), 4.0);
  EXPECT_EQ(v2.initial_state(1), 8.0);
  EXPECT_DOUBLE_EQ(v2.initial_state(2), M_PI / 4);
  EXPECT_EQ(v2.initial_state(3), 9.0);
  EXPECT_EQ(v2.schedule.value(0.0)(0), 0.0);
  EXPECT_EQ(v2.schedule.value(0.0)(1), 0.0);
  EXPECT_EQ(v2.geometry.wheelbase, 2.0);
  EXPECT_EQ(v2.geometry.circles[0].radius, 1.3);
  EXPECT_EQ(s.sim.step, 0.001);
  EXPECT_EQ(s.sim.forecast_steps(), 6000);
}

TEST(Run, TtcQueriesCarryDeltaV) {
  const std::string text = R"([vehicle.a]
model = double_integrator
state = 0 10
control = 0
radius = 1.3
mass = 1000

[vehicle.b]
model = double_integrator
state = 20 4
control = 0
radius = 1.3
mass = 3000

[query.q]
type = vehicle
i = a
j = b
ssm = ttc_longitudinal

[sim]
duration = 1
horizon = 10
)";
  Simulator sim(load_scenario(text));
  const auto out = sim.evaluate_query(sim.scenario().queries[0], RunMethod::Analytic);
  ASSERT_TRUE(out.analytic && out.analytic->t_c_star);
  ASSERT_TRUE(out.analytic->delta_v);
  const auto [dv_a, dv_b] = *out.analytic->delta_v;
  // momentum-weighted split of the 6 m/s closing speed
  EXPECT_NEAR(dv_a, 3000.0 / 4000.0 * (4.0 - 10.0), 1e-12);
  EXPECT_NEAR(dv_b, -1000.0 / 4000.0 * (4.0 - 10.0), 1e-12);
}

TEST(Run, NumericAndAnalyticAgreeOnLinearWorld) {
  const Scenario s = load_scenario(kTwoCarText);
  const RunRecord record = run(s, RunMethod::Both);
  for (const auto& eval : record.evaluations) {
    const auto& q = eval.outcomes[0];
    ASSERT_TRUE(q.analytic && q.numeric);
    ASSERT_TRUE(q.analytic->t_c_star && q.numeric->t_c_star);
    EXPECT_LT(std::abs(*q.analytic->t_c_star - *q.numeric->t_c_star),
              2.0 * s.sim.step);
    ASSERT_TRUE(q.e_tc);
    EXPECT_LT(*q.e_tc, 2.0 * s.sim.step);
  }
}

}  // namespace
}  // namespace ssm
