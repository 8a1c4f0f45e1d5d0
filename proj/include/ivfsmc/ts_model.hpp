#pragma once

// Affine Takagi-Sugeno models with Gaussian antecedents, either type-1
// (lower == upper) or interval type-2. Type reduction uses the endpoint
// average phi = (xi_l + xi_r) / 2 of the two normalized firing vectors, so
// the model output is linear in the consequent parameters:
//
//     y(x) = sum_i phi_i(x) * (a_i^T x + b_i) = theta^T basis(x)
//
// with theta = [a_1; b_1; ...; a_c; b_c] and
// basis(x) = [phi_1 x; phi_1; ...; phi_c x; phi_c].

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ivfsmc/clustering.hpp"
#include "ivfsmc/envelope.hpp"

namespace ivfsmc {

enum class ModelKind { Type1, Interval };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct TSRule {
    std::vector<IntervalGaussianMF> antecedents;  // one per input dimension
    Eigen::VectorXd slope;                        // a_i
    double offset = 0.0;                          // b_i
};

struct ModelMetadata {
    std::uint64_t seed = 0;
    double training_rmse = 0.0;
    bool rank_deficient = false;
};

class TSModel {
public:
    TSModel() = default;
    TSModel(ModelKind kind, int input_dim, std::vector<TSRule> rules);

    ModelKind kind() const { return kind_; }
    int input_dim() const { return input_dim_; }
    int rule_count() const { return static_cast<int>(rules_.size()); }
    const std::vector<TSRule>& rules() const { return rules_; }
    std::vector<TSRule>& rules() { return rules_; }

    // Length of theta / basis: c * (input_dim + 1).
    int parameter_count() const { return rule_count() * (input_dim_ + 1); }
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);

    ModelMetadata metadata;

private:
    ModelKind kind_ = ModelKind::Type1;
    int input_dim_ = 0;
    std::vector<TSRule> rules_;
};

struct FiringVector {
    Eigen::VectorXd lower;  // xi_l, normalized
    Eigen::VectorXd upper;  // xi_r, normalized

    Eigen::VectorXd averaged() const { return 0.5 * (lower + upper); }
};

// Product t-norm across input dimensions, each band normalized by its own
// sum. Throws NoRuleFires when both bands' total firing is below 1e-300.
FiringVector firing(const TSModel& model, const Eigen::VectorXd& x);

Eigen::VectorXd basis(const TSModel& model, const Eigen::VectorXd& x);

double infer(const TSModel& model, const Eigen::VectorXd& x);

struct RegressionData {
    Eigen::MatrixXd inputs;   // N x n
    Eigen::VectorXd targets;  // N

    Eigen::Index size() const { return inputs.rows(); }
    int input_dim() const { return static_cast<int>(inputs.cols()); }
    // [inputs | targets], the product space used for clustering.
    Eigen::MatrixXd product_space() const;
    void validate() const;
};

struct ConsequentFit {
    TSModel model;
    double training_rmse = 0.0;
    bool rank_deficient = false;
    int rank = 0;
};

// Global least squares over all rules' consequents jointly. Rank-deficient
// designs get the minimum-norm solution and `rank_deficient = true`.
ConsequentFit fit_consequents(const TSModel& antecedents, const RegressionData& data);

struct ModelBuildConfig {
    GKConfig clustering;
    EnvelopeConfig envelope;
};

struct ModelBuild {
    TSModel model;
    FuzzyPartition partition;
    double training_rmse = 0.0;
    bool rank_deficient = false;
};

// Clusters the product space, projects each cluster's memberships onto every
// input axis, turns each projection into an antecedent set (single Gaussian
// for type-1, envelope pair for interval) and fits the consequents.
ModelBuild build_model(const RegressionData& data, ModelKind kind, const ModelBuildConfig& cfg);

double rmse(const TSModel& model, const RegressionData& data);

}  // namespace ivfsmc
