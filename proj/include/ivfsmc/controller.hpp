#pragma once

// Indirect adaptive fuzzy sliding-mode control for one second-order channel
//
//     y'' = f(x) + sign * kappa(x) * theta_g* * u
//
// where f is unknown (approximated by theta_f^T basis_f(x)), theta_g* > 0 is
// an unknown gain parameter, kappa(x) > 0 is a known measured factor and
// sign is the known direction of the input (+1, or -1 for the altitude
// channel whose thrust acts against gravity in the model's z coordinate).
// A negative sign is handled by controlling the mirrored output -y, so every
// formula below is written for a positive input gain.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ivfsmc/ts_model.hpp"

namespace ivfsmc {

double sat(double x);

enum class SurfaceForm {
    ErrorPlusK0Rate,  // e_s = e + k0 e'
    K0ErrorPlusRate,  // e_s = k0 e + e'
};

enum class SwitchingMode { Saturation, Sign };

struct SlidingConfig {
    double k0 = 1.0;
    double gamma = 10.0;
    double epsilon = 0.1;  // boundary-layer half width
    double Wf = 0.1;
    double Wg = 0.1;
    double g0 = 1.0;       // lower bound on theta_g
    SurfaceForm surface = SurfaceForm::ErrorPlusK0Rate;
    SwitchingMode switching = SwitchingMode::Saturation;

    void validate() const;
};

struct TrackingState {
    double e = 0.0;
    double e_dot = 0.0;
    double e_s = 0.0;
    double e_eps = 0.0;
};

TrackingState sliding_vars(double e, double e_dot, const SlidingConfig& cfg);

// Certainty-equivalence term u_eq = -(f_hat + nu) / g_hat. Channels pass
// nu = -(y_d'' + gamma e_eps + k0 e'), which makes the ideal closed loop
// e_s' = -gamma e_eps. Throws ValidityError when g_hat < g0.
double equivalent_control(double fhat, double ghat, double nu, double g0);

// (1/g0) (Wf / attenuation + Wg |u_eq|) sat(e_s / epsilon). `attenuation`
// is the known input factor kappa (cos(phi)cos(theta) for altitude); it must
// be positive.
double switching_control(double Wf, double Wg, double u_eq, double g0, double e_s, double epsilon,
                         std::optional<double> attenuation = std::nullopt,
                         SwitchingMode mode = SwitchingMode::Saturation);

struct AdaptiveParams {
    Eigen::VectorXd theta_f;
    Eigen::VectorXd f_min, f_max;
    Eigen::VectorXd theta_g;
    Eigen::VectorXd g_min, g_max;
    double eta_f = 0.0;
    double eta_g = 0.0;

    void validate() const;
    bool within_bounds() const;
};

// Euler step of
//     theta_f' = -eta_f phi_f e_eps
//     theta_g' = -eta_g phi_g e_eps u_eq factor
// with the projection rule: a component sitting on a bound whose update
// points outward is frozen; any overshoot of a bound is clipped onto it.
// `phi_g` defaults to ones (constant gain parameter).
AdaptiveParams adapt_step(const AdaptiveParams& params, const Eigen::VectorXd& phi_f, double e_eps, double u_eq,
                          double factor, double dt, const Eigen::VectorXd& phi_g = {});

// Source of the drift estimate f_hat = theta_f^T basis(x).
class DriftModel {
public:
    enum class Kind { None, Constant, Fuzzy };

    static DriftModel none() { return DriftModel(Kind::None); }
    static DriftModel constant() { return DriftModel(Kind::Constant); }
    static DriftModel fuzzy(TSModel model);

    Kind kind() const { return kind_; }
    int parameter_count() const;
    int input_dim() const;
    Eigen::VectorXd basis(const Eigen::VectorXd& x) const;
    const TSModel& model() const { return model_; }

private:
    explicit DriftModel(Kind k) : kind_(k) {}
    Kind kind_;
    TSModel model_;
};

struct ChannelReference {
    double value = 0.0;
    double rate = 0.0;
    double accel = 0.0;
};

struct ChannelOutput {
    double u = 0.0;
    double u_eq = 0.0;
    double u_s = 0.0;
    double fhat = 0.0;
    double ghat = 0.0;
    TrackingState tracking;  // in the positive-gain frame
};

class SlidingChannel {
public:
    SlidingChannel(SlidingConfig cfg, DriftModel drift, AdaptiveParams params, double input_sign = 1.0);

    // Computes u = u_eq + u_s from the current estimates, then advances the
    // adaptation by dt. `drift_input` feeds the drift model; `kappa` is the
    // known input factor.
    ChannelOutput update(double y, double y_dot, const ChannelReference& ref, const Eigen::VectorXd& drift_input,
                         double kappa, double dt);

    // Same control law without touching the adaptive state.
    ChannelOutput evaluate(double y, double y_dot, const ChannelReference& ref, const Eigen::VectorXd& drift_input,
                           double kappa) const;

    const SlidingConfig& config() const { return cfg_; }
    const AdaptiveParams& params() const { return params_; }
    AdaptiveParams& params() { return params_; }
    const DriftModel& drift() const { return drift_; }
    double input_sign() const { return sign_; }
    void set_adaptation_enabled(bool on) { adapt_ = on; }
    bool adaptation_enabled() const { return adapt_; }

private:
    SlidingConfig cfg_;
    DriftModel drift_;
    AdaptiveParams params_;
    double sign_;
    bool adapt_ = true;
};

}  // namespace ivfsmc
