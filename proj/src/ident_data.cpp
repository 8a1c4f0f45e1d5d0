#include "ivfsmc/ident_data.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ivfsmc/csv.hpp"
#include "ivfsmc/errors.hpp"

namespace ivfsmc {

void IdentConfig::validate() const {
    if (n_ident < 1 || n_valid < 1) throw InvalidArgument("ident config: sample counts must be >= 1");
    if (!(dt > 0.0)) throw InvalidArgument("ident config: dt must be positive");
    if (!(noise_frac >= 0.0)) throw InvalidArgument("ident config: noise_frac must be >= 0");
    if (!(angle_amplitude > 0.0)) throw InvalidArgument("ident config: angle_amplitude must be positive");
    if (!(angle_limit > 0.0)) throw InvalidArgument("ident config: angle_limit must be positive");
    if (!(retry_damping > 0.0 && retry_damping < 1.0)) throw InvalidArgument("ident config: retry_damping must be in (0, 1)");
    if (!(pd_kp > 0.0) || !(pd_kd > 0.0)) throw InvalidArgument("ident config: PD gains must be positive");
    if (max_retries < 0) throw InvalidArgument("ident config: max_retries must be >= 0");
    params.validate();
}

namespace {

// Angle reference r(t) = A sum_k cos(w_k t + p_k) and its derivatives.
struct Excitation {
    std::array<double, 3> phase{};
    double amplitude = 0.0;

    ChannelReference at(double t) const {
        ChannelReference r;
        for (std::size_t k = 0; k < 3; ++k) {
            const double w = kExcitationFrequencies[k];
            const double a = w * t + phase[k];
            r.value += amplitude * std::cos(a);
            r.rate -= amplitude * w * std::sin(a);
            r.accel -= amplitude * w * w * std::cos(a);
        }
        return r;
    }
};

struct Trace {
    std::vector<double> t;
    std::vector<QuadState> x;
    std::vector<ControlInputs> u;
    std::vector<std::array<double, 3>> accel;  // true phi'', theta'', psi''
};

bool simulate(const IdentConfig& cfg, const std::array<Excitation, 3>& ex, double omega_phase, Trace& out) {
    const DerivedCoeffs c = derived_coeffs(cfg.params);
    const std::array<double, 3> b{c.b1, c.b2, c.b3};
    const int n = cfg.n_ident + cfg.n_valid;

    QuadState s;
    for (int i = 0; i < 3; ++i) {
        const ChannelReference r = ex[static_cast<std::size_t>(i)].at(0.0);
        s[2 * i] = r.value;
        s[2 * i + 1] = r.rate;
    }

    out = Trace{};
    for (int k = 0; k < n; ++k) {
        const double t = k * cfg.dt;
        ControlInputs u;
        // PD tracking of the excitation reference. Open loop is not an
        // option: the gyroscopic coupling makes the roll/pitch pair diverge.
        auto input = [&](int i, double angle, double rate) {
            const auto k = static_cast<std::size_t>(i);
            const ChannelReference r = ex[k].at(t);
            return (r.accel + cfg.pd_kp * (r.value - angle) + cfg.pd_kd * (r.rate - rate)) / b[k];
        };
        u.u_phi = input(0, s.phi(), s.phi_dot());
        u.u_theta = input(1, s.theta(), s.theta_dot());
        u.u_psi = input(2, s.psi(), s.psi_dot());
        u.u_z = cfg.params.mass * cfg.params.gravity;
        u.omega_r = cfg.omega_r_mean + cfg.omega_r_amplitude * std::sin(cfg.omega_r_frequency * t + omega_phase);

        if (std::abs(s.phi()) >= cfg.angle_limit || std::abs(s.theta()) >= cfg.angle_limit) return false;
        const QuadState d = dynamics(s, u, cfg.params);
        out.t.push_back(t);
        out.x.push_back(s);
        out.u.push_back(u);
        out.accel.push_back({d[kPhiDot], d[kThetaDot], d[kPsiDot]});
        s = step(s, u, cfg.params, cfg.dt);
    }
    return true;
}

}  // namespace

IdentData generate_ident_data(const IdentConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::array<Excitation, 3> ex;
    for (auto& e : ex)
        for (double& p : e.phase) p = phase(rng);
    const double omega_phase = phase(rng);

    IdentData data;
    Trace tr;
    double amplitude = cfg.angle_amplitude;
    for (int attempt = 0;; ++attempt) {
        for (auto& e : ex) e.amplitude = amplitude;
        if (simulate(cfg, ex, omega_phase, tr)) break;
        if (attempt == cfg.max_retries)
            throw ValidityError("generate_ident_data: attitude left the validity region after " +
                                std::to_string(cfg.max_retries) + " damped retries");
        amplitude *= cfg.retry_damping;
        data.retries = attempt + 1;
    }
    data.angle_amplitude = amplitude;

    const DerivedCoeffs c = derived_coeffs(cfg.params);
    const std::array<double, 3> b{c.b1, c.b2, c.b3};
    const auto n = static_cast<Eigen::Index>(tr.t.size());
    std::normal_distribution<double> normal(0.0, 1.0);

    for (int i = 0; i < 3; ++i) {
        const Axis axis = static_cast<Axis>(i);
        AxisDataset& set = data.sets[static_cast<std::size_t>(i)];
        set.axis = axis;
        switch (axis) {
            case Axis::Roll: set.input_names = {"theta_dot", "psi_dot", "omega_r"}; set.target_name = "f_phi"; break;
            case Axis::Pitch: set.input_names = {"phi_dot", "psi_dot", "omega_r"}; set.target_name = "f_theta"; break;
            case Axis::Yaw: set.input_names = {"phi_dot", "theta_dot"}; set.target_name = "f_psi"; break;
        }
        double lo = tr.accel[0][static_cast<std::size_t>(i)], hi = lo;
        for (const auto& a : tr.accel) {
            lo = std::min(lo, a[static_cast<std::size_t>(i)]);
            hi = std::max(hi, a[static_cast<std::size_t>(i)]);
        }
        set.noise_sigma = cfg.noise_frac * (hi - lo);

        const int dim = drift_regressor_count(axis);
        Eigen::MatrixXd inputs(n, dim);
        Eigen::VectorXd targets(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            inputs.row(k) = drift_regressors(axis, tr.x[kk], tr.u[kk].omega_r).transpose();
            const ControlInputs& u = tr.u[kk];
            const double bu = b[static_cast<std::size_t>(i)] *
                              (axis == Axis::Roll ? u.u_phi : axis == Axis::Pitch ? u.u_theta : u.u_psi);
            const double noise = set.noise_sigma > 0.0 ? set.noise_sigma * normal(rng) : 0.0;
            targets(k) = tr.accel[kk][static_cast<std::size_t>(i)] + noise - bu;
        }
        set.ident.inputs = inputs.topRows(cfg.n_ident);
        set.ident.targets = targets.head(cfg.n_ident);
        set.valid.inputs = inputs.bottomRows(cfg.n_valid);
        set.valid.targets = targets.tail(cfg.n_valid);
    }
    return data;
}

std::filesystem::path ident_file_name(Axis axis) {
    return std::string("ident_") + to_string(axis) + ".csv";
}

void write_ident_csv(const AxisDataset& set, double dt, const std::filesystem::path& path) {
    std::vector<std::string> header{"split", "t"};
    header.insert(header.end(), set.input_names.begin(), set.input_names.end());
    header.push_back(set.target_name);
    CsvWriter w(path, header);
    Eigen::Index k = 0;
    auto emit = [&](const RegressionData& d, const char* tag) {
        for (Eigen::Index r = 0; r < d.size(); ++r, ++k) {
            std::vector<std::string> f{tag, format_number(static_cast<double>(k) * dt)};
            for (Eigen::Index j = 0; j < d.inputs.cols(); ++j) f.push_back(format_number(d.inputs(r, j)));
            f.push_back(format_number(d.targets(r)));
            w.row(f);
        }
    };
    emit(set.ident, "ident");
    emit(set.valid, "valid");
    w.close();
}

AxisDataset read_ident_csv(Axis axis, const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const int dim = drift_regressor_count(axis);
    if (static_cast<int>(t.header.size()) != dim + 3 || t.header[0] != "split")
        throw IoError(path.string() + ": expected columns split,t,<" + std::to_string(dim) + " inputs>,target");
    AxisDataset set;
    set.axis = axis;
    set.input_names.assign(t.header.begin() + 2, t.header.end() - 1);
    set.target_name = t.header.back();

    std::vector<std::size_t> ident_rows, valid_rows;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& tag = t.rows[r][0];
        if (tag == "ident") ident_rows.push_back(r);
        else if (tag == "valid") valid_rows.push_back(r);
        else throw IoError(path.string() + ": split must be 'ident' or 'valid', got '" + tag + "'");
    }
    auto fill = [&](const std::vector<std::size_t>& rows, RegressionData& d) {
        d.inputs.resize(static_cast<Eigen::Index>(rows.size()), dim);
        d.targets.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (int j = 0; j < dim; ++j) d.inputs(static_cast<Eigen::Index>(i), j) = t.number(rows[i], j + 2);
            d.targets(static_cast<Eigen::Index>(i)) = t.number(rows[i], dim + 2);
        }
    };
    fill(ident_rows, set.ident);
    fill(valid_rows, set.valid);
    if (set.ident.size() == 0) throw IoError(path.string() + ": no identification rows");
    return set;
}

}  // namespace ivfsmc
