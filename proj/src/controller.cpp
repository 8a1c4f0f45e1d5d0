#include "ivfsmc/controller.hpp"

#include <algorithm>
#include <cmath>

#include "ivfsmc/errors.hpp"

namespace ivfsmc {

double sat(double x) {
    if (x >= 1.0) return 1.0;
    if (x <= -1.0) return -1.0;
    return x;
}

void SlidingConfig::validate() const {
    if (!(k0 > 0.0) || !(gamma > 0.0) || !(epsilon > 0.0) || !(g0 > 0.0))
        throw InvalidArgument("sliding config: k0, gamma, epsilon and g0 must be positive");
    if (!(Wf >= 0.0) || !(Wg >= 0.0)) throw InvalidArgument("sliding config: Wf and Wg must be >= 0");
}

TrackingState sliding_vars(double e, double e_dot, const SlidingConfig& cfg) {
    TrackingState t;
    t.e = e;
    t.e_dot = e_dot;
    t.e_s = cfg.surface == SurfaceForm::ErrorPlusK0Rate ? e + cfg.k0 * e_dot : cfg.k0 * e + e_dot;
    // Exactly zero inside the layer; e_s - eps*sat(e_s/eps) would leave rounding residue.
    if (std::abs(t.e_s) <= cfg.epsilon) {
        t.e_eps = 0.0;
    } else {
        t.e_eps = t.e_s - std::copysign(cfg.epsilon, t.e_s);
    }
    return t;
}

double equivalent_control(double fhat, double ghat, double nu, double g0) {
    if (!(g0 > 0.0)) throw InvalidArgument("equivalent_control: g0 must be positive");
    if (!(ghat >= g0)) {
        throw ValidityError("equivalent_control: g_hat fell below g0 (projection violated upstream)");
    }
    return -(fhat + nu) / ghat;
}

double switching_control(double Wf, double Wg, double u_eq, double g0, double e_s, double epsilon,
                         std::optional<double> attenuation, SwitchingMode mode) {
    if (!(g0 > 0.0) || !(epsilon > 0.0)) throw InvalidArgument("switching_control: g0 and epsilon must be positive");
    double wf = Wf;
    if (attenuation) {
        if (!(*attenuation > 0.0))
            throw ValidityError("switching_control: input factor must be positive (thrust direction invalid)");
        wf /= *attenuation;
    }
    const double gain = (wf + Wg * std::abs(u_eq)) / g0;
    const double shape = mode == SwitchingMode::Saturation ? sat(e_s / epsilon)
                                                           : (e_s > 0.0 ? 1.0 : (e_s < 0.0 ? -1.0 : 0.0));
    return gain * shape;
}

void AdaptiveParams::validate() const {
    if (f_min.size() != theta_f.size() || f_max.size() != theta_f.size())
        throw InvalidArgument("adaptive params: theta_f bounds have the wrong length");
    if (g_min.size() != theta_g.size() || g_max.size() != theta_g.size())
        throw InvalidArgument("adaptive params: theta_g bounds have the wrong length");
    if (!(eta_f >= 0.0) || !(eta_g >= 0.0)) throw InvalidArgument("adaptive params: adaptation gains must be >= 0");
    if ((f_min.array() > f_max.array()).any() || (g_min.array() > g_max.array()).any())
        throw InvalidArgument("adaptive params: min bound above max bound");
    if (!within_bounds()) throw InvalidArgument("adaptive params: initial parameters outside their bounds");
}

bool AdaptiveParams::within_bounds() const {
    return (theta_f.array() >= f_min.array()).all() && (theta_f.array() <= f_max.array()).all() &&
           (theta_g.array() >= g_min.array()).all() && (theta_g.array() <= g_max.array()).all();
}

namespace {

void projected_euler(Eigen::VectorXd& theta, const Eigen::VectorXd& rate, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi, double dt) {
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double r = rate(i);
        if ((theta(i) >= hi(i) && r > 0.0) || (theta(i) <= lo(i) && r < 0.0)) continue;
        theta(i) = std::clamp(theta(i) + dt * r, lo(i), hi(i));
    }
}

}  // namespace

AdaptiveParams adapt_step(const AdaptiveParams& params, const Eigen::VectorXd& phi_f, double e_eps, double u_eq,
                          double factor, double dt, const Eigen::VectorXd& phi_g) {
    if (!(dt > 0.0)) throw InvalidArgument("adapt_step: dt must be positive");
    if (phi_f.size() != params.theta_f.size()) throw InvalidArgument("adapt_step: basis length mismatch");
    AdaptiveParams next = params;
    if (e_eps == 0.0) return next;

    projected_euler(next.theta_f, -params.eta_f * e_eps * phi_f, params.f_min, params.f_max, dt);

    const Eigen::VectorXd g_basis = phi_g.size() == 0 ? Eigen::VectorXd::Ones(params.theta_g.size()) : phi_g;
    if (g_basis.size() != params.theta_g.size()) throw InvalidArgument("adapt_step: gain basis length mismatch");
    projected_euler(next.theta_g, -params.eta_g * e_eps * u_eq * factor * g_basis, params.g_min, params.g_max, dt);
    return next;
}

DriftModel DriftModel::fuzzy(TSModel model) {
    DriftModel d(Kind::Fuzzy);
    d.model_ = std::move(model);
    return d;
}

int DriftModel::parameter_count() const {
    switch (kind_) {
        case Kind::None: return 0;
        case Kind::Constant: return 1;
        case Kind::Fuzzy: return model_.parameter_count();
    }
    return 0;
}

int DriftModel::input_dim() const { return kind_ == Kind::Fuzzy ? model_.input_dim() : 0; }

Eigen::VectorXd DriftModel::basis(const Eigen::VectorXd& x) const {
    switch (kind_) {
        case Kind::None: return Eigen::VectorXd();
        case Kind::Constant: return Eigen::VectorXd::Ones(1);
        case Kind::Fuzzy: return ivfsmc::basis(model_, x);
    }
    return {};
}

SlidingChannel::SlidingChannel(SlidingConfig cfg, DriftModel drift, AdaptiveParams params, double input_sign)
    : cfg_(cfg), drift_(std::move(drift)), params_(std::move(params)), sign_(input_sign) {
    cfg_.validate();
    params_.validate();
    if (sign_ != 1.0 && sign_ != -1.0) throw InvalidArgument("sliding channel: input sign must be +1 or -1");
    if (params_.theta_f.size() != drift_.parameter_count())
        throw InvalidArgument("sliding channel: theta_f length does not match the drift model");
    if (params_.theta_g.size() != 1) throw InvalidArgument("sliding channel: theta_g must be a scalar parameter");
    if (params_.g_min(0) < cfg_.g0) throw InvalidArgument("sliding channel: theta_g lower bound must be >= g0");
}

namespace {

struct Evaluation {
    ChannelOutput out;
    Eigen::VectorXd basis;
};

Evaluation evaluate_channel(const SlidingConfig& cfg, const DriftModel& drift, const AdaptiveParams& params,
                            double sign, double y, double y_dot, const ChannelReference& ref,
                            const Eigen::VectorXd& drift_input, double kappa) {
    if (!(kappa > 0.0)) throw ValidityError("sliding channel: known input factor must be positive");
    Evaluation ev;
    ChannelOutput& o = ev.out;
    o.tracking = sliding_vars(sign * (ref.value - y), sign * (ref.rate - y_dot), cfg);
    ev.basis = drift.basis(drift_input);
    o.fhat = ev.basis.size() ? sign * params.theta_f.dot(ev.basis) : 0.0;
    o.ghat = kappa * params.theta_g(0);

    const double nu = -(sign * ref.accel + cfg.gamma * o.tracking.e_eps + cfg.k0 * o.tracking.e_dot);
    o.u_eq = equivalent_control(o.fhat, o.ghat, nu, kappa * cfg.g0);
    o.u_s = switching_control(cfg.Wf, cfg.Wg, o.u_eq, cfg.g0, o.tracking.e_s, cfg.epsilon, kappa, cfg.switching);
    o.u = o.u_eq + o.u_s;
    return ev;
}

}  // namespace

ChannelOutput SlidingChannel::evaluate(double y, double y_dot, const ChannelReference& ref,
                                       const Eigen::VectorXd& drift_input, double kappa) const {
    return evaluate_channel(cfg_, drift_, params_, sign_, y, y_dot, ref, drift_input, kappa).out;
}

ChannelOutput SlidingChannel::update(double y, double y_dot, const ChannelReference& ref,
                                     const Eigen::VectorXd& drift_input, double kappa, double dt) {
    Evaluation ev = evaluate_channel(cfg_, drift_, params_, sign_, y, y_dot, ref, drift_input, kappa);
    if (adapt_) {
        // In the mirrored frame the drift basis picks up the input sign.
        const Eigen::VectorXd phi_f = sign_ * ev.basis;
        params_ = adapt_step(params_, phi_f, ev.out.tracking.e_eps, ev.out.u_eq, kappa, dt);
    }
    return ev.out;
}

}  // namespace ivfsmc
