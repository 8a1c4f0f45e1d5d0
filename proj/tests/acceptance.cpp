// Acceptance checks. One PASS/FAIL line per criterion, followed by indented
// diagnostics. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ivfsmc/clustering.hpp"
#include "ivfsmc/controller.hpp"
#include "ivfsmc/envelope.hpp"
#include "ivfsmc/identification.hpp"
#include "ivfsmc/quadrotor.hpp"
#include "ivfsmc/scenario.hpp"
#include "ivfsmc/ts_model.hpp"

using namespace ivfsmc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { notes.push_back("     " + what); }
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string pair_text(const std::string& ch, double iv, double t1) {
    std::ostringstream os;
    os << ch << ": ivfc " << fmt("%.6g", iv) << " vs t1fc " << fmt("%.6g", t1);
    return os.str();
}

bool within_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

// Identification reports for seeds 1..10, built once and shared.
const std::vector<IdentificationReport>& reports() {
    static const std::vector<IdentificationReport> r = [] {
        std::vector<IdentificationReport> out;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) out.push_back(identify_seed(seed));
        return out;
    }();
    return r;
}

struct PairRun {
    RunMetrics ivfc, t1fc;
    double max_seconds = 0.0;
};

PairRun run_pair(ScenarioConfig cfg, const IdentificationReport& rep) {
    PairRun p;
    for (ControllerKind k : {ControllerKind::IVFC, ControllerKind::T1FC}) {
        cfg.controller = k;
        const auto t0 = Clock::now();
        RunMetrics m = run_scenario(cfg, attitude_models(rep, model_kind_for(k))).metrics;
        p.max_seconds = std::max(p.max_seconds, seconds_since(t0));
        (k == ControllerKind::IVFC ? p.ivfc : p.t1fc) = std::move(m);
    }
    return p;
}

bool ivfc_le(const PairRun& p, const std::string& ch) { return p.ivfc.channel(ch).mse <= p.t1fc.channel(ch).mse; }

// Number of seeds 1..10 on which IVFC <= T1FC holds for every listed channel.
int seed_wins(const ScenarioConfig& cfg, const std::vector<std::string>& channels) {
    int wins = 0;
    for (const auto& rep : reports()) {
        const PairRun p = run_pair(cfg, rep);
        bool all = !p.ivfc.aborted && !p.t1fc.aborted;
        for (const auto& ch : channels) all = all && ivfc_le(p, ch);
        wins += all ? 1 : 0;
    }
    return wins;
}

Verdict criterion1() {
    Verdict v;
    const auto t0 = Clock::now();
    const auto& reps = reports();
    const double elapsed = seconds_since(t0);
    const char* names[] = {"f_phi", "f_theta", "f_psi"};
    const double target_iv[] = {1.40, 1.10, 0.19};
    const double target_t1[] = {1.60, 1.17, 0.21};
    int scale_seeds = 0;
    for (int a = 0; a < 3; ++a) {
        int wins = 0;
        for (const auto& r : reps) wins += r.axes[a].valid_rmse_interval <= r.axes[a].valid_rmse_type1 ? 1 : 0;
        v.require(wins >= 8, std::string(names[a]) + " ordering RMSE(IVFM) <= RMSE(T1FM) in " + std::to_string(wins) +
                                 "/10 seeds (need >= 8)");
    }
    for (const auto& r : reps) {
        bool ok = true;
        for (int a = 0; a < 3; ++a) {
            const double iv = r.axes[a].valid_rmse_interval, t1 = r.axes[a].valid_rmse_type1;
            ok = ok && iv >= target_iv[a] / 2 && iv <= target_iv[a] * 2 && t1 >= target_t1[a] / 2 && t1 <= target_t1[a] * 2;
        }
        scale_seeds += ok ? 1 : 0;
    }
    v.require(scale_seeds >= 1, "seeds with all six RMSEs within 2x of the reference values: " +
                                    std::to_string(scale_seeds) + " (need >= 1)");
    std::ostringstream row;
    row << "seed 1 RMSE ivfm/t1fm:";
    for (int a = 0; a < 3; ++a)
        row << " " << names[a] << " " << fmt("%.4f", reps[0].axes[a].valid_rmse_interval) << "/"
            << fmt("%.4f", reps[0].axes[a].valid_rmse_type1);
    v.note(row.str());
    v.require(elapsed < 30.0, "identification of 10 seeds took " + fmt("%.2f", elapsed) + " s (limit 30)");
    return v;
}

Verdict criterion2() {
    Verdict v;
    const ScenarioConfig cfg = ScenarioConfig::attitude_default();
    const PairRun p = run_pair(cfg, reports()[0]);
    v.require(!p.ivfc.aborted && !p.t1fc.aborted, "both runs completed");
    v.require(ivfc_le(p, "theta"), pair_text("theta", p.ivfc.channel("theta").mse, p.t1fc.channel("theta").mse));
    v.require(ivfc_le(p, "beta"), pair_text("beta", p.ivfc.channel("beta").mse, p.t1fc.channel("beta").mse));
    v.require(within_rel(p.ivfc.channel("psi").mse, p.t1fc.channel("psi").mse, 0.05),
              pair_text("psi", p.ivfc.channel("psi").mse, p.t1fc.channel("psi").mse) + " (within 5%)");
    v.require(p.max_seconds < 5.0, "slowest run " + fmt("%.3f", p.max_seconds) + " s (limit 5)");
    v.note("diagnostic: theta and beta ordering held on " + std::to_string(seed_wins(cfg, {"theta", "beta"})) +
           "/10 seeds");
    return v;
}

Verdict criterion3() {
    Verdict v;
    double slowest = 0.0;
    for (const char* level : {"0.1", "0.15", "0.2"}) {
        ScenarioConfig cfg = ScenarioConfig::attitude_default();
        cfg.disturbance = DisturbanceSpec::parse(std::string("param:jr=") + level + ",window=12:14");
        const PairRun p = run_pair(cfg, reports()[0]);
        slowest = std::max(slowest, p.max_seconds);
        const std::string tag = std::string("dJr=") + level + " ";
        v.require(!p.ivfc.aborted && !p.t1fc.aborted, tag + "both runs completed");
        v.require(ivfc_le(p, "theta"), tag + pair_text("theta", p.ivfc.channel("theta").mse, p.t1fc.channel("theta").mse));
        v.require(ivfc_le(p, "beta"), tag + pair_text("beta", p.ivfc.channel("beta").mse, p.t1fc.channel("beta").mse));
        v.note("diagnostic: " + tag + "ordering held on " + std::to_string(seed_wins(cfg, {"theta", "beta"})) +
               "/10 seeds");
    }
    v.require(slowest < 5.0, "slowest run " + fmt("%.3f", slowest) + " s (limit 5)");
    return v;
}

Verdict criterion4() {
    Verdict v;
    ScenarioConfig cfg = ScenarioConfig::position_default();
    cfg.disturbance = DisturbanceSpec::parse("angle:phi=0.25@8:8.5,theta=0.25@9:9.5");
    const PairRun p = run_pair(cfg, reports()[0]);
    v.require(!p.ivfc.aborted && !p.t1fc.aborted, "both runs completed");
    v.require(ivfc_le(p, "x"), pair_text("x", p.ivfc.channel("x").mse, p.t1fc.channel("x").mse));
    v.require(ivfc_le(p, "y"), pair_text("y", p.ivfc.channel("y").mse, p.t1fc.channel("y").mse));
    v.require(within_rel(p.ivfc.channel("z").mse, p.t1fc.channel("z").mse, 0.01),
              pair_text("z", p.ivfc.channel("z").mse, p.t1fc.channel("z").mse) + " (within 1%)");
    v.require(p.max_seconds < 5.0, "slowest run " + fmt("%.3f", p.max_seconds) + " s (limit 5)");
    v.note("diagnostic: x and y ordering held on " + std::to_string(seed_wins(cfg, {"x", "y"})) + "/10 seeds");
    return v;
}

bool gk_property() {
    std::mt19937 rng(2024);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_int_distribution<int> dims(2, 4), clusters(1, 4), blobs(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = dims(rng), nb = blobs(rng);
        Eigen::MatrixXd X(60, dim);
        for (Eigen::Index k = 0; k < X.rows(); ++k)
            for (int j = 0; j < dim; ++j) X(k, j) = 4.0 * static_cast<double>(k % nb) + n(rng) * (0.3 + 0.7 * j);
        GKConfig cfg;
        cfg.clusters = clusters(rng);
        cfg.seed = static_cast<std::uint64_t>(trial);
        const FuzzyPartition p = gk_cluster(X, cfg);
        if ((p.memberships.array() < 0.0).any() || (p.memberships.array() > 1.0).any()) return false;
        for (Eigen::Index k = 0; k < X.rows(); ++k)
            if (std::abs(p.memberships.col(k).sum() - 1.0) > 1e-9) return false;
        for (std::size_t t = 1; t < p.objective_history.size(); ++t)
            if (p.objective_history[t] > p.objective_history[t - 1] + 1e-9) return false;
    }
    return true;
}

bool envelope_property() {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> noise(0.0, 0.2), width(0.3, 2.0), centre(-1.0, 1.0), ux(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double nz = noise(rng), w = width(rng), c0 = centre(rng);
        std::uniform_real_distribution<double> un(-nz, nz);
        std::vector<double> xs, ys;
        for (int i = 0; i < 300; ++i) {
            const double x = ux(rng);
            xs.push_back(x);
            ys.push_back(std::clamp(std::exp(-0.5 * std::pow((x - c0) / w, 2)) + un(rng), 0.0, 1.0));
        }
        const ScatterSet s = ScatterSet::prepare(xs, ys);
        const IntervalGaussianMF mf = build_interval_mf(s, 2, 2);
        const double lo = s.xs().front(), hi = s.xs().back();
        for (int g = 0; g < 1000; ++g) {
            const double x = lo + (hi - lo) * g / 999.0;
            if (mf.lower(x) > mf.upper(x) + 1e-9) return false;
        }
        std::size_t inside = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.y(i) >= mf.lower(s.x(i)) - nz && s.y(i) <= mf.upper(s.x(i)) + nz) ++inside;
        if (10 * inside < 9 * s.size()) return false;
    }
    return true;
}

// Interval inference with coincident lower and upper MFs against a direct
// type-1 evaluation.
bool type1_equivalence() {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), sg(0.3, 1.5), h(0.2, 1.0);
    const int dim = 3, c = 4;
    std::vector<TSRule> rules;
    for (int i = 0; i < c; ++i) {
        TSRule r;
        for (int j = 0; j < dim; ++j) {
            const GaussianMF g{u(rng), sg(rng), h(rng)};
            r.antecedents.push_back(IntervalGaussianMF{g, g});
        }
        r.slope = Eigen::VectorXd(dim);
        for (int j = 0; j < dim; ++j) r.slope(j) = 3.0 * u(rng);
        r.offset = u(rng);
        rules.push_back(r);
    }
    const TSModel m(ModelKind::Interval, dim, rules);
    for (int t = 0; t < 1000; ++t) {
        Eigen::VectorXd x(dim);
        for (int j = 0; j < dim; ++j) x(j) = 2.0 * u(rng);
        double num = 0.0, den = 0.0;
        for (const TSRule& r : rules) {
            double w = 1.0;
            for (int j = 0; j < dim; ++j) {
                const GaussianMF& g = r.antecedents[static_cast<std::size_t>(j)].lower;
                w *= g.height * std::exp(-0.5 * std::pow((x(j) - g.center) / g.sigma, 2));
            }
            num += w * (r.slope.dot(x) + r.offset);
            den += w;
        }
        const double ref = num / den;
        if (std::abs(infer(m, x) - ref) > 1e-12 * std::max(1.0, std::abs(ref))) return false;
    }
    return true;
}

bool sliding_identities() {
    for (double x : {-3.0, -1.0, -0.4, 0.0, 0.4, 1.0, 3.0})
        if (sat(x) != std::clamp(x, -1.0, 1.0)) return false;
    SlidingConfig cfg;
    for (double k0 : {1.0, 5.0}) {
        cfg.k0 = k0;
        for (double e : {-0.5, -0.05, 0.0, 0.03, 0.7})
            for (double ed : {-0.2, 0.0, 0.01, 0.3}) {
                const TrackingState t = sliding_vars(e, ed, cfg);
                const double es = e + k0 * ed;
                if (t.e_s != es) return false;
                if (t.e_eps != es - cfg.epsilon * sat(es / cfg.epsilon)) return false;
            }
    }
    return true;
}

double max_state_diff(const QuadState& a, const QuadState& b) {
    double m = 0.0;
    for (int i = 0; i < kStateSize; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

QuadState integrate(QuadState s, const ControlInputs& u, const QuadParams& p, double dt, double horizon) {
    const int n = static_cast<int>(std::lround(horizon / dt));
    for (int i = 0; i < n; ++i) s = step(s, u, p, dt);
    return s;
}

Verdict criterion5() {
    Verdict v;
    const auto t0 = Clock::now();
    v.require(gk_property(), "GK column-stochastic memberships and non-increasing objective, 100 datasets");
    v.require(envelope_property(), "interval MF dominance and 90% coverage, 50 clouds");
    v.require(type1_equivalence(), "interval inference with equal bands matches type-1 at 1e-12, 1000 inputs");

    const RunMetrics run =
        run_scenario(ScenarioConfig::attitude_default(), attitude_models(reports()[0], ModelKind::Interval)).metrics;
    v.require(!run.aborted && run.projection_ok, "adaptive parameters stayed inside projection bounds over 20 s");
    v.require(sliding_identities(), "sat and sliding-variable identities exact");

    const QuadParams p;
    ControlInputs hover;
    hover.u_z = p.mass * p.gravity;
    const double drift = max_state_diff(integrate(QuadState{}, hover, p, 0.01, 10.0), QuadState{});
    v.require(drift < 1e-9, "hover drift over 1000 steps " + fmt("%.3g", drift) + " (limit 1e-9)");

    QuadState s0;
    s0[kPhi] = 0.2;
    s0[kPhiDot] = 0.8;
    s0[kTheta] = -0.3;
    s0[kThetaDot] = -0.6;
    s0[kPsiDot] = 1.0;
    ControlInputs u{0.3, -0.2, 0.05, 12.0, 80.0};
    const QuadState ref = integrate(s0, u, p, 1e-4, 1.0);
    const double e1 = max_state_diff(integrate(s0, u, p, 0.04, 1.0), ref);
    const double e2 = max_state_diff(integrate(s0, u, p, 0.02, 1.0), ref);
    const double order = std::log2(e1 / e2);
    v.require(std::abs(order - 4.0) <= 0.5, "RK4 order estimate " + fmt("%.3f", order));

    const double elapsed = seconds_since(t0);
    v.require(elapsed < 10.0, "property suites took " + fmt("%.2f", elapsed) + " s (limit 10)");
    return v;
}

double total_variation(const std::vector<double>& u) {
    double tv = 0.0;
    for (std::size_t k = 1; k < u.size(); ++k) tv += std::abs(u[k] - u[k - 1]);
    return tv;
}

Verdict criterion6() {
    Verdict v;
    ScenarioConfig cfg = ScenarioConfig::attitude_default();
    cfg.theta = ReferenceProfile::sinusoid(1.0, 1.0);
    cfg.phi = ReferenceProfile::sinusoid(1.0, 1.0, std::numbers::pi);
    cfg.gains.attitude.Wf_axis = approximation_bounds(reports()[0], ModelKind::Interval);
    const auto models = attitude_models(reports()[0], ModelKind::Interval);
    const ScenarioResult sat_run = run_scenario(cfg, models);
    v.require(!sat_run.metrics.aborted, "saturation run completed");
    const std::vector<double> t = sat_run.log.series("t");
    const double eps = cfg.gains.attitude.sliding.epsilon;
    for (const char* col : {"es_phi", "es_theta", "es_psi"}) {
        const std::vector<double> es = sat_run.log.series(col);
        double peak = 0.0;
        for (std::size_t k = 0; k < es.size(); ++k)
            if (t[k] >= 5.0) peak = std::max(peak, std::abs(es[k]));
        v.require(peak <= eps, std::string("max |") + col + "| after 5 s = " + fmt("%.4f", peak) + " (limit 0.1)");
    }
    cfg.gains.attitude.sliding.switching = SwitchingMode::Sign;
    const ScenarioResult sign_run = run_scenario(cfg, models);
    v.require(!sign_run.metrics.aborted, "sign run completed");
    const double tv_sat = total_variation(sat_run.log.series("U_phi"));
    const double tv_sign = total_variation(sign_run.log.series("U_phi"));
    v.require(tv_sign > tv_sat, "total variation of U_phi: sign " + fmt("%.3f", tv_sign) + " vs sat " + fmt("%.3f", tv_sat));
    const auto& wf = *cfg.gains.attitude.Wf_axis;
    v.note("Wf per axis from validation max error: " + fmt("%.4f", wf[0]) + " " + fmt("%.4f", wf[1]) + " " +
           fmt("%.4f", wf[2]));
    return v;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* title;
        Verdict (*fn)();
    };
    const Entry entries[] = {
        {1, "identification ordering and scale", criterion1},
        {2, "nominal tracking ordering", criterion2},
        {3, "disturbance rejection ordering", criterion3},
        {4, "position perturbation ordering", criterion4},
        {5, "property suites", criterion5},
        {6, "sliding-variable convergence and chattering", criterion6},
    };
    int failures = 0;
    for (const Entry& e : entries) {
        Verdict v;
        try {
            v = e.fn();
        } catch (const std::exception& ex) {
            v.require(false, std::string("exception: ") + ex.what());
        }
        failures += v.pass ? 0 : 1;
        std::cout << "criterion " << e.id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << e.title << "\n";
        for (const auto& n : v.notes) std::cout << "    " << n << "\n";
        std::cout.flush();
    }
    return failures == 0 ? 0 : 1;
}
