#include "ivfsmc/ts_model.hpp"

#include <cmath>
#include <limits>

#include "ivfsmc/errors.hpp"

namespace ivfsmc {

namespace {

const double kLogFiringFloor = std::log(1e-300);

// log of the product-t-norm firing of every rule in one band.
template <typename Band>
Eigen::VectorXd log_strengths(const TSModel& model, const Eigen::VectorXd& x, Band band) {
    Eigen::VectorXd out(model.rule_count());
    for (int i = 0; i < model.rule_count(); ++i) {
        double acc = 0.0;
        const auto& rule = model.rules()[static_cast<std::size_t>(i)];
        for (int j = 0; j < model.input_dim(); ++j) {
            const GaussianMF& g = band(rule.antecedents[static_cast<std::size_t>(j)]);
            const double z = (x(j) - g.center) / g.sigma;
            acc += std::log(g.height) - 0.5 * z * z;
        }
        out(i) = acc;
    }
    return out;
}

Eigen::VectorXd normalize_log(const Eigen::VectorXd& logw) {
    const double top = logw.maxCoeff();
    Eigen::VectorXd w = (logw.array() - top).exp().matrix();
    return w / w.sum();
}

double log_sum(const Eigen::VectorXd& logw) {
    const double top = logw.maxCoeff();
    if (!std::isfinite(top)) return top;
    return top + std::log((logw.array() - top).exp().sum());
}

// Antecedent for a projection cloud whose memberships carry no shape (c = 1):
// a unit-height Gaussian spanning the data.
IntervalGaussianMF flat_antecedent(const Eigen::VectorXd& column) {
    const double mean = column.mean();
    const double var = (column.array() - mean).square().mean();
    GaussianMF g{mean, var > 0.0 ? std::sqrt(var) : 1.0, 1.0};
    return {g, g};
}

}  // namespace

const char* to_string(ModelKind kind) {
    return kind == ModelKind::Type1 ? "type1" : "interval";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "type1" || s == "t1") return ModelKind::Type1;
    if (s == "interval" || s == "ivfm") return ModelKind::Interval;
    throw InvalidArgument("unknown model kind '" + s + "' (expected type1 or interval)");
}

TSModel::TSModel(ModelKind kind, int input_dim, std::vector<TSRule> rules)
    : kind_(kind), input_dim_(input_dim), rules_(std::move(rules)) {
    if (input_dim_ < 1) throw InvalidArgument("TSModel: input dimension must be positive");
    if (rules_.empty()) throw InvalidArgument("TSModel: at least one rule required");
    for (auto& rule : rules_) {
        if (static_cast<int>(rule.antecedents.size()) != input_dim_)
            throw InvalidArgument("TSModel: antecedent count must equal the input dimension");
        if (rule.slope.size() == 0) rule.slope = Eigen::VectorXd::Zero(input_dim_);
        if (rule.slope.size() != input_dim_)
            throw InvalidArgument("TSModel: consequent slope has the wrong length");
        for (const auto& mf : rule.antecedents) {
            for (const GaussianMF* g : {&mf.lower, &mf.upper}) {
                if (!(g->sigma > 0.0) || !(g->height > 0.0) || g->height > 1.0 || !std::isfinite(g->center))
                    throw InvalidArgument("TSModel: antecedent needs sigma > 0 and height in (0, 1]");
            }
        }
    }
}

Eigen::VectorXd TSModel::parameters() const {
    Eigen::VectorXd theta(parameter_count());
    Eigen::Index k = 0;
    for (const auto& rule : rules_) {
        theta.segment(k, input_dim_) = rule.slope;
        k += input_dim_;
        theta(k++) = rule.offset;
    }
    return theta;
}

void TSModel::set_parameters(const Eigen::VectorXd& theta) {
    if (theta.size() != parameter_count()) throw InvalidArgument("TSModel: parameter vector length mismatch");
    Eigen::Index k = 0;
    for (auto& rule : rules_) {
        rule.slope = theta.segment(k, input_dim_);
        k += input_dim_;
        rule.offset = theta(k++);
    }
}

FiringVector firing(const TSModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.input_dim()) throw InvalidArgument("firing: input dimension mismatch");
    if (!x.allFinite()) throw InvalidArgument("firing: non-finite input");

    const Eigen::VectorXd log_lo = log_strengths(model, x, [](const IntervalGaussianMF& mf) -> const GaussianMF& { return mf.lower; });
    const Eigen::VectorXd log_up = log_strengths(model, x, [](const IntervalGaussianMF& mf) -> const GaussianMF& { return mf.upper; });
    if (log_sum(log_lo) < kLogFiringFloor && log_sum(log_up) < kLogFiringFloor) {
        throw NoRuleFires("no rule fires: total firing below 1e-300 in both bands");
    }
    return {normalize_log(log_lo), normalize_log(log_up)};
}

Eigen::VectorXd basis(const TSModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd phi = firing(model, x).averaged();
    const int n = model.input_dim();
    Eigen::VectorXd out(model.parameter_count());
    for (int i = 0; i < model.rule_count(); ++i) {
        out.segment(i * (n + 1), n) = phi(i) * x;
        out(i * (n + 1) + n) = phi(i);
    }
    return out;
}

double infer(const TSModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd phi = firing(model, x).averaged();
    double y = 0.0;
    for (int i = 0; i < model.rule_count(); ++i) {
        const auto& rule = model.rules()[static_cast<std::size_t>(i)];
        y += phi(i) * (rule.slope.dot(x) + rule.offset);
    }
    return y;
}

Eigen::MatrixXd RegressionData::product_space() const {
    Eigen::MatrixXd z(inputs.rows(), inputs.cols() + 1);
    z << inputs, targets;
    return z;
}

void RegressionData::validate() const {
    if (inputs.rows() == 0) throw InvalidArgument("regression data is empty");
    if (inputs.rows() != targets.size()) throw InvalidArgument("regression data: row count mismatch");
    if (!inputs.allFinite() || !targets.allFinite()) throw InvalidArgument("regression data: non-finite entry");
}

ConsequentFit fit_consequents(const TSModel& antecedents, const RegressionData& data) {
    data.validate();
    if (data.input_dim() != antecedents.input_dim()) throw InvalidArgument("fit_consequents: input dimension mismatch");
    const auto N = data.size();
    const int p = antecedents.parameter_count();
    if (N < p) throw InvalidArgument("fit_consequents: need at least c * (n + 1) samples");

    Eigen::MatrixXd design(N, p);
    for (Eigen::Index k = 0; k < N; ++k) design.row(k) = basis(antecedents, data.inputs.row(k).transpose()).transpose();

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    cod.setThreshold(1e-12);
    const Eigen::VectorXd theta = cod.solve(data.targets);

    ConsequentFit out;
    out.model = antecedents;
    out.model.set_parameters(theta);
    out.rank = static_cast<int>(cod.rank());
    out.rank_deficient = out.rank < p;
    const Eigen::VectorXd resid = data.targets - design * theta;
    out.training_rmse = std::sqrt(resid.squaredNorm() / static_cast<double>(N));
    out.model.metadata.training_rmse = out.training_rmse;
    out.model.metadata.rank_deficient = out.rank_deficient;
    return out;
}

ModelBuild build_model(const RegressionData& data, ModelKind kind, const ModelBuildConfig& cfg) {
    data.validate();
    const int n = data.input_dim();
    const int c = cfg.clustering.clusters;

    ModelBuild out;
    out.partition = gk_cluster(data.product_space(), cfg.clustering);

    std::vector<TSRule> rules(static_cast<std::size_t>(c));
    for (int i = 0; i < c; ++i) {
        auto& rule = rules[static_cast<std::size_t>(i)];
        rule.slope = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < n; ++j) {
            const Eigen::VectorXd column = data.inputs.col(j);
            if (c == 1) {
                rule.antecedents.push_back(flat_antecedent(column));
                continue;
            }
            std::vector<double> xs(column.data(), column.data() + column.size());
            std::vector<double> ys(static_cast<std::size_t>(data.size()));
            for (Eigen::Index k = 0; k < data.size(); ++k) ys[static_cast<std::size_t>(k)] = out.partition.memberships(i, k);
            const ScatterSet cloud = ScatterSet::prepare(std::move(xs), std::move(ys));
            if (kind == ModelKind::Type1) {
                const GaussianMF g = fit_gaussian(cloud).mf;
                rule.antecedents.push_back({g, g});
            } else {
                rule.antecedents.push_back(build_interval_mf_detailed(cloud, cfg.envelope).mf);
            }
        }
    }

    const TSModel skeleton(kind, n, std::move(rules));
    ConsequentFit fit = fit_consequents(skeleton, data);
    out.model = std::move(fit.model);
    out.model.metadata.seed = cfg.clustering.seed;
    out.training_rmse = fit.training_rmse;
    out.rank_deficient = fit.rank_deficient;
    return out;
}

double rmse(const TSModel& model, const RegressionData& data) {
    data.validate();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < data.size(); ++k) {
        const double r = data.targets(k) - infer(model, data.inputs.row(k).transpose());
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(data.size()));
}

}  // namespace ivfsmc
