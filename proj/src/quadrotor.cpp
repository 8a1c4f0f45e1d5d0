#include "ivfsmc/quadrotor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ivfsmc/errors.hpp"

namespace ivfsmc {

void QuadParams::validate() const {
    for (double v : {Ixx, Iyy, Izz, mass, arm, gravity, drag, thrust, rotor_inertia}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("quadrotor parameters must be positive and finite");
    }
}

DerivedCoeffs derived_coeffs(const QuadParams& p) {
    p.validate();
    return {
        (p.Iyy - p.Izz) / p.Ixx,
        p.rotor_inertia / p.Ixx,
        (p.Izz - p.Ixx) / p.Iyy,
        p.rotor_inertia / p.Iyy,
        (p.Ixx - p.Iyy) / p.Izz,
        p.arm / p.Ixx,
        p.arm / p.Iyy,
        1.0 / p.Izz,
    };
}

bool QuadState::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool QuadState::in_validity_region() const {
    constexpr double half_pi = std::numbers::pi / 2.0;
    return std::abs(phi()) < half_pi && std::abs(theta()) < half_pi;
}

std::string QuadState::to_string() const {
    static constexpr const char* names[kStateSize] = {"phi", "phi_dot", "theta", "theta_dot", "psi", "psi_dot",
                                                      "z", "z_dot", "x", "x_dot", "y", "y_dot"};
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < kStateSize; ++i) os << (i ? " " : "") << names[i] << '=' << v[static_cast<std::size_t>(i)];
    return os.str();
}

double f_phi(const QuadState& s, double omega_r, const DerivedCoeffs& c) {
    return s.theta_dot() * s.psi_dot() * c.a1 + s.theta_dot() * c.a2 * omega_r;
}

double f_theta(const QuadState& s, double omega_r, const DerivedCoeffs& c) {
    return s.phi_dot() * s.psi_dot() * c.a3 + s.phi_dot() * c.a4 * omega_r;
}

double f_psi(const QuadState& s, const DerivedCoeffs& c) {
    return s.theta_dot() * s.phi_dot() * c.a5;
}

double direction_x(const QuadState& s) {
    return std::cos(s.phi()) * std::sin(s.theta()) * std::cos(s.psi()) - std::sin(s.phi()) * std::sin(s.psi());
}

double direction_y(const QuadState& s) {
    return std::cos(s.phi()) * std::sin(s.theta()) * std::sin(s.psi()) - std::sin(s.phi()) * std::cos(s.psi());
}

QuadState dynamics(const QuadState& s, const ControlInputs& u, const QuadParams& p) {
    if (!s.all_finite()) throw NonFiniteState("dynamics: non-finite state " + s.to_string());
    for (double v : {u.u_phi, u.u_theta, u.u_psi, u.u_z, u.omega_r}) {
        if (!std::isfinite(v)) throw InvalidArgument("dynamics: non-finite control input");
    }
    const DerivedCoeffs c = derived_coeffs(p);
    const double thrust_accel = u.u_z / p.mass;

    QuadState d;
    d[kPhi] = s.phi_dot();
    d[kPhiDot] = f_phi(s, u.omega_r, c) + c.b1 * u.u_phi;
    d[kTheta] = s.theta_dot();
    d[kThetaDot] = f_theta(s, u.omega_r, c) + c.b2 * u.u_theta;
    d[kPsi] = s.psi_dot();
    d[kPsiDot] = f_psi(s, c) + c.b3 * u.u_psi;
    d[kZ] = s.z_dot();
    d[kZDot] = p.gravity - std::cos(s.phi()) * std::cos(s.theta()) * thrust_accel;
    d[kX] = s.x_dot();
    d[kXDot] = direction_x(s) * thrust_accel;
    d[kY] = s.y_dot();
    d[kYDot] = direction_y(s) * thrust_accel;
    return d;
}

ControlInputs mix_motors(const std::array<double, 4>& omegas, MixOptions opts) {
    for (double w : omegas) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("mix_motors: rotor speeds must be finite and >= 0");
    }
    std::array<double, 4> e = omegas;
    if (opts.square_speeds)
        for (double& w : e) w *= w;
    ControlInputs u;
    u.u_phi = e[0] - e[2];
    u.u_theta = e[3] - e[1];
    u.u_psi = e[0] + e[2] - e[1] - e[3];
    u.u_z = e[0] + e[1] + e[2] + e[3];
    u.omega_r = omegas[0] - omegas[1] + omegas[2] - omegas[3];
    return u;
}

QuadState step(const QuadState& s, const ControlInputs& u, const QuadParams& p, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("step: dt must be positive");
    auto axpy = [](const QuadState& a, double h, const QuadState& k) {
        QuadState out;
        for (int i = 0; i < kStateSize; ++i) out[i] = a[i] + h * k[i];
        return out;
    };
    const QuadState k1 = dynamics(s, u, p);
    const QuadState k2 = dynamics(axpy(s, 0.5 * dt, k1), u, p);
    const QuadState k3 = dynamics(axpy(s, 0.5 * dt, k2), u, p);
    const QuadState k4 = dynamics(axpy(s, dt, k3), u, p);
    QuadState next;
    for (int i = 0; i < kStateSize; ++i) next[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!next.all_finite()) throw NonFiniteState("step produced a non-finite state from " + s.to_string());
    return next;
}

}  // namespace ivfsmc
