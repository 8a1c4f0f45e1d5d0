#pragma once

// 12-state quadrotor model under the small-perturbation assumption (body
// rates equal Euler-angle rates). Sign conventions are kept literally:
// z'' = g - cos(phi) cos(theta) U_z / m, so positive thrust decelerates z.

#include <array>
#include <string>

namespace ivfsmc {

struct QuadParams {
    double Ixx = 0.18;          // kg m^2
    double Iyy = 0.18;          // kg m^2
    double Izz = 0.09;          // kg m^2
    double mass = 1.2;          // kg
    double arm = 0.23;          // m
    double gravity = 9.81;      // m/s^2
    double drag = 1.1e-6;       // N m s^2
    double thrust = 54.2e-6;    // N s^2
    double rotor_inertia = 1.32e-3;  // kg m^2

    static QuadParams table1() { return {}; }
    void validate() const;
};

struct DerivedCoeffs {
    double a1, a2, a3, a4, a5;
    double b1, b2, b3;
};

DerivedCoeffs derived_coeffs(const QuadParams& p);

enum StateIndex : int {
    kPhi = 0, kPhiDot, kTheta, kThetaDot, kPsi, kPsiDot,
    kZ, kZDot, kX, kXDot, kY, kYDot,
};

inline constexpr int kStateSize = 12;

struct QuadState {
    std::array<double, kStateSize> v{};

    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    double phi() const { return v[kPhi]; }
    double phi_dot() const { return v[kPhiDot]; }
    double theta() const { return v[kTheta]; }
    double theta_dot() const { return v[kThetaDot]; }
    double psi() const { return v[kPsi]; }
    double psi_dot() const { return v[kPsiDot]; }
    double z() const { return v[kZ]; }
    double z_dot() const { return v[kZDot]; }
    double x() const { return v[kX]; }
    double x_dot() const { return v[kXDot]; }
    double y() const { return v[kY]; }
    double y_dot() const { return v[kYDot]; }

    bool all_finite() const;
    // |phi|, |theta| < pi/2, where the decoupled model is meaningful.
    bool in_validity_region() const;
    std::string to_string() const;
};

struct ControlInputs {
    double u_phi = 0.0;
    double u_theta = 0.0;
    double u_psi = 0.0;
    double u_z = 0.0;
    double omega_r = 0.0;  // residual rotor speed, rad/s
};

// Unknown-to-the-controller drift terms of the attitude channels.
double f_phi(const QuadState& s, double omega_r, const DerivedCoeffs& c);
double f_theta(const QuadState& s, double omega_r, const DerivedCoeffs& c);
double f_psi(const QuadState& s, const DerivedCoeffs& c);

// Translational direction terms u_x, u_y as printed next to the model.
double direction_x(const QuadState& s);
double direction_y(const QuadState& s);

QuadState dynamics(const QuadState& s, const ControlInputs& u, const QuadParams& p);

struct MixOptions {
    bool square_speeds = false;  // use Omega_i^2 instead of Omega_i for U
};

// Rotor speeds (rad/s) to virtual inputs. Omega_r always uses raw speeds.
ControlInputs mix_motors(const std::array<double, 4>& omegas, MixOptions opts = {});

// One classical RK4 step with zero-order-hold inputs.
QuadState step(const QuadState& s, const ControlInputs& u, const QuadParams& p, double dt);

}  // namespace ivfsmc
