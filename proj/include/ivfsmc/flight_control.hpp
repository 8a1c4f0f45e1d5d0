#pragma once

// Attitude, altitude and position controllers for the quadrotor built from
// SlidingChannel, plus the inversion from position commands to desired
// roll/pitch angles.

#include <array>
#include <optional>

#include "ivfsmc/controller.hpp"
#include "ivfsmc/quadrotor.hpp"

namespace ivfsmc {

enum class Axis { Roll = 0, Pitch = 1, Yaw = 2 };

const char* to_string(Axis axis);

// Regressors of each attitude drift term:
//   roll  f_phi(theta', psi', Omega_r)
//   pitch f_theta(phi', psi', Omega_r)
//   yaw   f_psi(phi', theta')
Eigen::VectorXd drift_regressors(Axis axis, const QuadState& s, double omega_r);
int drift_regressor_count(Axis axis);

struct AdaptationGains {
    double eta_f = 1e-3;
    double eta_g = 0.05;
    // theta_f bounds are +/- bound_scale * max(|theta_f0|, bound_floor).
    double bound_scale = 10.0;
    double bound_floor = 0.01;
    // theta_g is kept in [g_lo * nominal, g_hi * nominal]; g0 = g_lo * nominal.
    double g_lo = 0.5;
    double g_hi = 2.0;
};

struct AttitudeSettings {
    SlidingConfig sliding{};       // g0 is filled in per axis from the gain bounds
    AdaptationGains adaptation{};
    // Per-axis override of sliding.Wf (roll, pitch, yaw), e.g. a bound on the
    // model error measured on validation data.
    std::optional<std::array<double, 3>> Wf_axis;
};

struct AltitudeSettings {
    SlidingConfig sliding{};
    AdaptationGains adaptation{.eta_f = 0.5, .eta_g = 0.01};
    // cos(phi) cos(theta) below this aborts: thrust authority lost.
    double min_tilt_factor = 0.1;
};

struct PositionSettings {
    SlidingConfig sliding{.k0 = 5.0, .gamma = 2.0, .Wf = 0.0};
    AdaptationGains adaptation{.eta_f = 0.0, .eta_g = 0.005};
};

AdaptiveParams make_adaptive_params(const Eigen::VectorXd& theta_f0, double gain_nominal,
                                    const AdaptationGains& gains);

class AttitudeController {
public:
    // `models` hold the identified drift models for roll, pitch, yaw;
    // `gain_nominal` the initial input gains (b1, b2, b3).
    AttitudeController(const std::array<TSModel, 3>& models, const std::array<double, 3>& gain_nominal,
                       const AttitudeSettings& settings);

    struct Command {
        std::array<double, 3> u{};  // U_phi, U_theta, U_psi
        std::array<ChannelOutput, 3> channels{};
    };

    Command update(const QuadState& s, const std::array<ChannelReference, 3>& ref, double omega_r, double dt);

    // U for one axis with the current estimates; does not adapt.
    double control(Axis axis, const QuadState& s, const ChannelReference& ref, double omega_r) const;

    SlidingChannel& channel(Axis axis) { return channels_[static_cast<std::size_t>(axis)]; }
    const SlidingChannel& channel(Axis axis) const { return channels_[static_cast<std::size_t>(axis)]; }

private:
    std::array<SlidingChannel, 3> channels_;
};

class AltitudeController {
public:
    AltitudeController(double gravity_nominal, double inv_mass_nominal, const AltitudeSettings& settings);

    struct Command {
        double u_z = 0.0;  // clamped at zero
        ChannelOutput channel;
    };

    Command update(const QuadState& s, const ChannelReference& ref, double dt);
    Command evaluate(const QuadState& s, const ChannelReference& ref) const;

    SlidingChannel& channel() { return channel_; }
    const SlidingChannel& channel() const { return channel_; }

private:
    double tilt_factor(const QuadState& s) const;
    SlidingChannel channel_;
    double min_tilt_;
};

class PositionController {
public:
    PositionController(double inv_mass_nominal, const PositionSettings& settings);

    struct Command {
        double u_x = 0.0;  // clamped to [-1, 1]
        double u_y = 0.0;
        std::array<ChannelOutput, 2> channels{};
    };

    Command update(const QuadState& s, const ChannelReference& x_ref, const ChannelReference& y_ref, double u_z,
                   double dt);
    Command evaluate(const QuadState& s, const ChannelReference& x_ref, const ChannelReference& y_ref,
                     double u_z) const;

    SlidingChannel& channel(int i) { return channels_[static_cast<std::size_t>(i)]; }
    const SlidingChannel& channel(int i) const { return channels_[static_cast<std::size_t>(i)]; }

private:
    std::array<SlidingChannel, 2> channels_;
};

struct DesiredAngles {
    double phi = 0.0;
    double theta = 0.0;
    bool clamped = false;  // an arcsin argument left [-1, 1]
};

DesiredAngles desired_angles(double u_x, double u_y, double psi_d);

}  // namespace ivfsmc
