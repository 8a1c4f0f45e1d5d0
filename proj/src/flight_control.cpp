#include "ivfsmc/flight_control.hpp"

#include <algorithm>
#include <cmath>

#include "ivfsmc/errors.hpp"

namespace ivfsmc {

const char* to_string(Axis axis) {
    switch (axis) {
        case Axis::Roll: return "roll";
        case Axis::Pitch: return "pitch";
        case Axis::Yaw: return "yaw";
    }
    return "?";
}

Eigen::VectorXd drift_regressors(Axis axis, const QuadState& s, double omega_r) {
    switch (axis) {
        case Axis::Roll: return Eigen::Vector3d(s.theta_dot(), s.psi_dot(), omega_r);
        case Axis::Pitch: return Eigen::Vector3d(s.phi_dot(), s.psi_dot(), omega_r);
        case Axis::Yaw: return Eigen::Vector2d(s.phi_dot(), s.theta_dot());
    }
    return {};
}

int drift_regressor_count(Axis axis) { return axis == Axis::Yaw ? 2 : 3; }

AdaptiveParams make_adaptive_params(const Eigen::VectorXd& theta_f0, double gain_nominal,
                                    const AdaptationGains& gains) {
    if (!(gain_nominal > 0.0)) throw InvalidArgument("adaptive params: nominal gain must be positive");
    if (!(gains.g_lo > 0.0) || !(gains.g_lo <= 1.0) || !(gains.g_hi >= 1.0))
        throw InvalidArgument("adaptive params: need 0 < g_lo <= 1 <= g_hi");
    if (!(gains.bound_scale >= 1.0) || !(gains.bound_floor >= 0.0))
        throw InvalidArgument("adaptive params: bound_scale must be >= 1 and bound_floor >= 0");

    AdaptiveParams p;
    p.theta_f = theta_f0;
    const Eigen::VectorXd span =
        gains.bound_scale * theta_f0.cwiseAbs().cwiseMax(Eigen::VectorXd::Constant(theta_f0.size(), gains.bound_floor));
    p.f_min = -span;
    p.f_max = span;
    p.theta_g = Eigen::VectorXd::Constant(1, gain_nominal);
    p.g_min = Eigen::VectorXd::Constant(1, gains.g_lo * gain_nominal);
    p.g_max = Eigen::VectorXd::Constant(1, gains.g_hi * gain_nominal);
    p.eta_f = gains.eta_f;
    p.eta_g = gains.eta_g;
    p.validate();
    return p;
}

namespace {

SlidingChannel make_channel(SlidingConfig cfg, DriftModel drift, const Eigen::VectorXd& theta_f0, double nominal,
                            const AdaptationGains& gains, double sign) {
    cfg.g0 = gains.g_lo * nominal;
    return SlidingChannel(cfg, std::move(drift), make_adaptive_params(theta_f0, nominal, gains), sign);
}

std::array<SlidingChannel, 3> make_attitude_channels(const std::array<TSModel, 3>& models,
                                                     const std::array<double, 3>& nominal,
                                                     const AttitudeSettings& settings) {
    auto one = [&](int i) {
        const TSModel& m = models[static_cast<std::size_t>(i)];
        if (m.input_dim() != drift_regressor_count(static_cast<Axis>(i)))
            throw InvalidArgument(std::string("attitude controller: ") + to_string(static_cast<Axis>(i)) +
                                  " model has the wrong input dimension");
        SlidingConfig cfg = settings.sliding;
        if (settings.Wf_axis) cfg.Wf = (*settings.Wf_axis)[static_cast<std::size_t>(i)];
        return make_channel(cfg, DriftModel::fuzzy(m), m.parameters(), nominal[static_cast<std::size_t>(i)],
                            settings.adaptation, 1.0);
    };
    return {one(0), one(1), one(2)};
}

double channel_value(Axis axis, const QuadState& s) {
    return axis == Axis::Roll ? s.phi() : axis == Axis::Pitch ? s.theta() : s.psi();
}

double channel_rate(Axis axis, const QuadState& s) {
    return axis == Axis::Roll ? s.phi_dot() : axis == Axis::Pitch ? s.theta_dot() : s.psi_dot();
}

}  // namespace

AttitudeController::AttitudeController(const std::array<TSModel, 3>& models,
                                       const std::array<double, 3>& gain_nominal,
                                       const AttitudeSettings& settings)
    : channels_(make_attitude_channels(models, gain_nominal, settings)) {}

AttitudeController::Command AttitudeController::update(const QuadState& s, const std::array<ChannelReference, 3>& ref,
                                                       double omega_r, double dt) {
    Command cmd;
    for (int i = 0; i < 3; ++i) {
        const Axis axis = static_cast<Axis>(i);
        const auto k = static_cast<std::size_t>(i);
        cmd.channels[k] = channels_[k].update(channel_value(axis, s), channel_rate(axis, s), ref[k],
                                              drift_regressors(axis, s, omega_r), 1.0, dt);
        cmd.u[k] = cmd.channels[k].u;
    }
    return cmd;
}

double AttitudeController::control(Axis axis, const QuadState& s, const ChannelReference& ref, double omega_r) const {
    return channel(axis)
        .evaluate(channel_value(axis, s), channel_rate(axis, s), ref, drift_regressors(axis, s, omega_r), 1.0)
        .u;
}

AltitudeController::AltitudeController(double gravity_nominal, double inv_mass_nominal,
                                       const AltitudeSettings& settings)
    : channel_(make_channel(settings.sliding, DriftModel::constant(), Eigen::VectorXd::Constant(1, gravity_nominal),
                            inv_mass_nominal, settings.adaptation, -1.0)),
      min_tilt_(settings.min_tilt_factor) {}

double AltitudeController::tilt_factor(const QuadState& s) const {
    const double k = std::cos(s.phi()) * std::cos(s.theta());
    if (!(k > min_tilt_)) {
        throw ValidityError("altitude control: cos(phi)cos(theta) = " + std::to_string(k) +
                            " below the validity limit, thrust authority lost");
    }
    return k;
}

AltitudeController::Command AltitudeController::update(const QuadState& s, const ChannelReference& ref, double dt) {
    Command cmd;
    cmd.channel = channel_.update(s.z(), s.z_dot(), ref, Eigen::VectorXd(), tilt_factor(s), dt);
    cmd.u_z = std::max(0.0, cmd.channel.u);
    return cmd;
}

AltitudeController::Command AltitudeController::evaluate(const QuadState& s, const ChannelReference& ref) const {
    Command cmd;
    cmd.channel = channel_.evaluate(s.z(), s.z_dot(), ref, Eigen::VectorXd(), tilt_factor(s));
    cmd.u_z = std::max(0.0, cmd.channel.u);
    return cmd;
}

PositionController::PositionController(double inv_mass_nominal, const PositionSettings& settings)
    : channels_{make_channel(settings.sliding, DriftModel::none(), Eigen::VectorXd(), inv_mass_nominal,
                             settings.adaptation, 1.0),
                make_channel(settings.sliding, DriftModel::none(), Eigen::VectorXd(), inv_mass_nominal,
                             settings.adaptation, 1.0)} {}

namespace {

void check_thrust(double u_z) {
    if (!(u_z > 0.0)) throw ValidityError("position control: U_z must be positive to steer the thrust direction");
}

}  // namespace

PositionController::Command PositionController::update(const QuadState& s, const ChannelReference& x_ref,
                                                       const ChannelReference& y_ref, double u_z, double dt) {
    check_thrust(u_z);
    Command cmd;
    cmd.channels[0] = channels_[0].update(s.x(), s.x_dot(), x_ref, Eigen::VectorXd(), u_z, dt);
    cmd.channels[1] = channels_[1].update(s.y(), s.y_dot(), y_ref, Eigen::VectorXd(), u_z, dt);
    cmd.u_x = std::clamp(cmd.channels[0].u, -1.0, 1.0);
    cmd.u_y = std::clamp(cmd.channels[1].u, -1.0, 1.0);
    return cmd;
}

PositionController::Command PositionController::evaluate(const QuadState& s, const ChannelReference& x_ref,
                                                         const ChannelReference& y_ref, double u_z) const {
    check_thrust(u_z);
    Command cmd;
    cmd.channels[0] = channels_[0].evaluate(s.x(), s.x_dot(), x_ref, Eigen::VectorXd(), u_z);
    cmd.channels[1] = channels_[1].evaluate(s.y(), s.y_dot(), y_ref, Eigen::VectorXd(), u_z);
    cmd.u_x = std::clamp(cmd.channels[0].u, -1.0, 1.0);
    cmd.u_y = std::clamp(cmd.channels[1].u, -1.0, 1.0);
    return cmd;
}

DesiredAngles desired_angles(double u_x, double u_y, double psi_d) {
    DesiredAngles out;
    auto clamped_asin = [&out](double a) {
        if (a > 1.0 || a < -1.0) {
            out.clamped = true;
            a = std::clamp(a, -1.0, 1.0);
        }
        return std::asin(a);
    };
    const double sp = std::sin(psi_d);
    const double cp = std::cos(psi_d);
    out.phi = clamped_asin(u_x * sp - u_y * cp);
    const double c = std::cos(out.phi);
    const double num = u_x * cp - u_y * sp;
    // cos(phi) == 0 only when the roll argument saturated at +/-1.
    out.theta = c > 0.0 ? clamped_asin(num / c) : clamped_asin(num == 0.0 ? 0.0 : std::copysign(2.0, num));
    return out;
}

}  // namespace ivfsmc
