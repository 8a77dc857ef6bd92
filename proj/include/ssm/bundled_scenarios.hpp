#pragma once

namespace ssm::bundled {

// Lane change toward a neighboring vehicle, both heading northeast. The
// planar-model linearization error peaks at the first evaluation and decays
// as the gap closes.
inline constexpr const char* kExperiment1 = R"(# ssm-scenario v1
# lane-change conflict, planar kinematics, Cartesian frame

[vehicle.1]
model = bicycle
state = 8 2 0.7853981633974483 10
control = 0.01 -0.1
wheelbase = 2.5
radius = 1.5
mass = 1500

[vehicle.2]
model = bicycle
state = 4 8 0.7853981633974483 9
control = 0 0
wheelbase = 2
radius = 1.3
mass = 1500

[query.1]
type = vehicle
i = 1
j = 2

[sim]
duration = 5.2
period = 0.1
horizon = 6
step = 0.001
)";

// Constant-curvature curve on a grade; the held steering angle is too
// shallow for the bend, so the vehicle drifts across the lane into the
// outer edge. Torque-driven dynamics in path coordinates.
inline constexpr const char* kExperiment2 = R"(# ssm-scenario v1
# curve departure, torque dynamics, path frame

[road]
path = arc
origin = 0 0
heading = 0
curvature = 0.01
length = 400
width = 6
grade = 0.03

[vehicle.1]
model = composed_path
state = 0 0.15 -0.02 9
control = 0.024 230 0.03 0.01
wheelbase = 2.5
radius = 1.5
mass = 1500
rho = 1.2
c_d = 0.25
s_front = 2
r_whl = 0.25
f_roll = 0.015

[query.outer]
type = boundary
i = 1
side = 2

[query.inner]
type = boundary
i = 1
side = 1

[sim]
duration = 5.5
period = 0.1
horizon = 6
step = 0.001
)";

// Car following on a straight lane: the trailing vehicle holds a wheel
// torque that closes the 20 m gap. The constant-speed 1D TTC reads the
// conflict far later than the torque-dynamics forecast does.
inline constexpr const char* kExperiment3CarFollowing = R"(# ssm-scenario v1
# car-following conflict: 1D TTC versus torque-dynamics forecast

[vehicle.1]
model = composed_bicycle
state = 0 0 0 6
control = 0 275.85 0
wheelbase = 2
radius = 1.3
mass = 1500
rho = 1.2
c_d = 0.25
s_front = 2
r_whl = 0.25
f_roll = 0.015

[vehicle.2]
model = bicycle
state = 20 0 0 5
control = 0 0
wheelbase = 2
radius = 1.3
mass = 1500

[query.ttc1d]
type = vehicle
i = 1
j = 2
ssm = ttc_longitudinal

[query.full3d]
type = vehicle
i = 1
j = 2

[sim]
duration = 6
period = 0.1
horizon = 25
step = 0.001
)";

// Merging across a lane at steady speed: the lateral-axis TTC against the
// full planar closing geometry.
inline constexpr const char* kExperiment3Merging = R"(# ssm-scenario v1
# merging conflict: lateral 1D TTC versus planar forecast

[vehicle.1]
model = composed_bicycle
state = 0.5 8 -0.0535439 5
control = -0.0312846 57.05625 0
wheelbase = 2
radius = 1.3
mass = 1500
rho = 1.2
c_d = 0.25
s_front = 2
r_whl = 0.25
f_roll = 0.015

[vehicle.2]
model = bicycle
state = 0 0 0 5
control = 0 0
wheelbase = 2
radius = 1.3
mass = 1500

[query.ttc1d]
type = vehicle
i = 1
j = 2
ssm = ttc_lateral

[query.full3d]
type = vehicle
i = 1
j = 2

[sim]
duration = 4.5
period = 0.1
horizon = 25
step = 0.001
)";

// Two-lane curve with an obstacle in the starting lane. The subject
// accelerates, swerves left while braking hard, settles into the left lane,
// and accelerates away; every conflict class appears and disappears in
// sequence across the snapshots.
inline constexpr const char* kExperiment4 = R"(# ssm-scenario v1
# combined Cartesian + path evaluation with a four-phase control schedule

[road]
path = arc
origin = 0 0
heading = 0
curvature = 0.01
length = 400
width = 8
grade = 0.03

[vehicle.1]
model = composed_bicycle
state = 0 -2 0 8
control = 0.0196053 282.6 0.03
control@5 = 0.0262411 -122.8 0.03
control@10 = 0.0102074 167.8 0.03
control@15 = 0.0204088 355.5 0.03
wheelbase = 2
radius = 1.3
mass = 1500
rho = 1.2
c_d = 0.25
s_front = 2
r_whl = 0.25
f_roll = 0.015

[vehicle.2]
model = bicycle
state = 0 2 0 5
control = 0.0204054 0
wheelbase = 2
radius = 1.3
mass = 1500

[obstacle.rock]
center = 81.787846540 37.721687897
radius = 1

[query.veh]
type = vehicle
i = 1
j = 2

[query.obs]
type = obstacle
i = 1
k = rock

[query.upper]
type = boundary
i = 1
side = 1

[query.lower]
type = boundary
i = 1
side = 2

[sim]
duration = 20
period = 0.1
horizon = 15
step = 0.001
snapshots = 1 4 6 9 11 14 16 19
)";

struct NamedScenario {
  const char* name;
  const char* file_name;
  const char* text;
};

inline constexpr NamedScenario kAll[] = {
    {"experiment1", "experiment1.cfg", kExperiment1},
    {"experiment2", "experiment2.cfg", kExperiment2},
    {"experiment3_car_following", "experiment3_car_following.cfg",
     kExperiment3CarFollowing},
    {"experiment3_merging", "experiment3_merging.cfg", kExperiment3Merging},
    {"experiment4", "experiment4.cfg", kExperiment4},
};

}  // namespace ssm::bundled
