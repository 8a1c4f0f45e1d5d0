#pragma once

// Closed-loop scenarios: reference profiles, disturbances, the cascade
// (altitude, optional position loop, desired angles, attitude, plant) and
// tracking metrics.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ivfsmc/flight_control.hpp"
#include "ivfsmc/quadrotor.hpp"
#include "ivfsmc/ts_model.hpp"

namespace ivfsmc {

// offset + amplitude * sin(frequency * t + phase), replaced by a constant
// inside any hold window (where the derivatives are zero).
struct ReferenceProfile {
    struct Hold {
        double t0 = 0.0;
        double t1 = 0.0;
        double value = 0.0;
    };

    double offset = 0.0;
    double amplitude = 0.0;
    double frequency = 0.0;  // rad/s
    double phase = 0.0;      // rad
    std::vector<Hold> holds;

    static ReferenceProfile constant(double v) { return {v, 0.0, 0.0, 0.0, {}}; }
    static ReferenceProfile sinusoid(double amplitude, double frequency, double phase = 0.0, double offset = 0.0) {
        return {offset, amplitude, frequency, phase, {}};
    }

    ChannelReference at(double t) const;
    void validate() const;
};

struct DisturbanceSpec {
    enum class Kind { None, Param, AdditiveAngle };
    struct Window {
        double t0 = 0.0;
        double t1 = 0.0;
        bool contains(double t) const { return t >= t0 && t < t1; }
    };

    Kind kind = Kind::None;
    // Param: Jr -> Jr (1 + jr_frac), I -> I (1 + inertia_frac) inside `window`.
    double jr_frac = 0.0;
    double inertia_frac = 0.0;
    Window window{};
    // AdditiveAngle: offsets added to the desired roll / pitch angles.
    double dphi = 0.0;
    Window phi_window{};
    double dtheta = 0.0;
    Window theta_window{};

    static DisturbanceSpec none() { return {}; }
    static DisturbanceSpec param(double jr_frac, double inertia_frac, Window w);
    static DisturbanceSpec additive_angle(double dphi, Window phi_w, double dtheta, Window theta_w);

    // Grammar (see docs/formats.md):
    //   none
    //   param:jr=<frac>[,inertia=<frac>],window=<t0>:<t1>
    //   angle:phi=<rad>@<t0>:<t1>[,theta=<rad>@<t0>:<t1>]
    static DisturbanceSpec parse(const std::string& text);
    std::string to_string() const;
    void validate(double duration) const;

    QuadParams plant_params(const QuadParams& nominal, double t) const;
    double phi_offset(double t) const;
    double theta_offset(double t) const;
};

enum class ScenarioMode { Attitude, Position };
enum class ControllerKind { T1FC, IVFC };

const char* to_string(ScenarioMode m);
const char* to_string(ControllerKind k);
ControllerKind controller_kind_from_string(const std::string& s);
ModelKind model_kind_for(ControllerKind k);

struct ControllerSettings {
    AttitudeSettings attitude{};
    AltitudeSettings altitude{};
    PositionSettings position{};
    // Feed the finite-difference rate of the desired angles forward in the
    // position cascade (the accelerations are always taken as zero).
    bool angle_rate_feedforward = true;
};

struct ScenarioConfig {
    std::string name = "scenario";
    ScenarioMode mode = ScenarioMode::Attitude;
    ReferenceProfile phi, theta, psi, z, x, y;
    double duration = 20.0;
    double dt = 0.01;
    ControllerKind controller = ControllerKind::IVFC;
    DisturbanceSpec disturbance{};
    std::uint64_t seed = 1;  // identification seed when models are built on the fly
    double omega_r = 100.0;  // residual rotor speed held by the plant, rad/s
    QuadState initial{};
    QuadParams plant{};
    ControllerSettings gains{};

    void validate() const;

    // theta_d = sin t, phi_d = sin(t + pi), psi_d = 0.2, z_d = 1, with the
    // angles held at 0 for t in [10, 12].
    static ScenarioConfig attitude_default();
    // x_d = sin t, y_d = sin(t + pi), z_d = 1, psi_d = 0.2.
    static ScenarioConfig position_default();
};

nlohmann::json to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct ChannelMetrics {
    std::string name;
    double mse = 0.0;
    double rmse = 0.0;
    double final_error = 0.0;
};

struct RunMetrics {
    std::string scenario;
    std::string controller;
    std::string disturbance;
    int steps = 0;
    bool aborted = false;
    double abort_time = 0.0;
    std::string abort_code;
    std::string abort_reason;
    std::vector<ChannelMetrics> channels;
    // Largest |theta_g - theta_g(0)| seen on each attitude axis.
    std::array<double, 3> max_gain_drift{};
    bool projection_ok = true;  // every parameter stayed inside its bounds

    const ChannelMetrics& channel(const std::string& name) const;
    nlohmann::json to_json() const;
    static RunMetrics from_json(const nlohmann::json& doc);
};

// MSE over the samples; RMSE = sqrt(MSE).
ChannelMetrics channel_metrics(const std::string& name, const std::vector<double>& errors);

struct TrajectoryLog {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const;
    std::vector<double> series(const std::string& name) const;
    void write_csv(const std::filesystem::path& path) const;
};

struct ScenarioResult {
    RunMetrics metrics;
    TrajectoryLog log;
};

// Errors from the controllers or the plant stop the run; the metrics cover
// the steps completed and record the failing time and reason.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::array<TSModel, 3>& models);

// Metric channel names per mode. "beta" is the roll error (phi_d - phi).
std::vector<std::string> metric_channels(ScenarioMode mode);

}  // namespace ivfsmc
