#include "ivfsmc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ivfsmc/errors.hpp"

namespace ivfsmc {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kRegularization = 1e-8;

// A_i = (rho det F)^(1/n) F^-1, computed through the eigendecomposition of F.
Eigen::MatrixXd norm_from_covariance(Eigen::MatrixXd F, double rho, int cluster, bool allow_degenerate) {
    const auto n = F.rows();
    const double trace = F.trace();
    if (!std::isfinite(trace) || trace <= 0.0) {
        if (allow_degenerate) {
            return std::pow(rho, 1.0 / static_cast<double>(n)) *
                   Eigen::MatrixXd::Identity(n, n);
        }
        throw SingularCovariance(
            cluster, "cluster " + std::to_string(cluster) +
                         " has a collapsed fuzzy covariance (fewer effective samples than "
                         "dimensions); reduce the cluster count or regularize the data");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(F);
    double lo = eig.eigenvalues().minCoeff();
    double hi = eig.eigenvalues().maxCoeff();
    if (lo <= 0.0 || hi / lo > kConditionLimit) {
        F += kRegularization * trace / static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
        eig.compute(F);
        lo = eig.eigenvalues().minCoeff();
    }
    if (!(lo > 0.0)) {
        throw SingularCovariance(cluster, "cluster " + std::to_string(cluster) +
                                              " covariance is singular after regularization");
    }

    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double log_det = lambda.array().log().sum();
    const double scale = std::exp((std::log(rho) + log_det) / static_cast<double>(n));
    const Eigen::MatrixXd& Q = eig.eigenvectors();
    Eigen::MatrixXd A = scale * Q * lambda.cwiseInverse().asDiagonal() * Q.transpose();
    return 0.5 * (A + A.transpose());
}

void update_memberships(const Eigen::MatrixXd& d2, double m, Eigen::MatrixXd& U) {
    const auto c = d2.rows();
    const auto N = d2.cols();
    const double p = 1.0 / (m - 1.0);
    for (Eigen::Index k = 0; k < N; ++k) {
        const double dmin = d2.col(k).minCoeff();
        if (dmin <= 0.0) {
            // Sample sits on one or more centers: share membership among them.
            const double zeros = static_cast<double>((d2.col(k).array() <= 0.0).count());
            for (Eigen::Index i = 0; i < c; ++i) U(i, k) = d2(i, k) <= 0.0 ? 1.0 / zeros : 0.0;
            continue;
        }
        double total = 0.0;
        for (Eigen::Index i = 0; i < c; ++i) {
            U(i, k) = std::pow(dmin / d2(i, k), p);
            total += U(i, k);
        }
        U.col(k) /= total;
    }
}

}  // namespace

void GKConfig::validate() const {
    if (clusters < 1) throw InvalidArgument("GK: cluster count must be >= 1");
    if (!(fuzziness > 1.0)) throw InvalidArgument("GK: fuzziness exponent m must be > 1");
    if (!(tol > 0.0)) throw InvalidArgument("GK: tolerance must be > 0");
    if (max_iter < 1) throw InvalidArgument("GK: max_iter must be >= 1");
    if (!volumes.empty()) {
        if (static_cast<int>(volumes.size()) != clusters)
            throw InvalidArgument("GK: one volume per cluster required");
        for (double r : volumes)
            if (!(r > 0.0)) throw InvalidArgument("GK: cluster volumes must be positive");
    }
}

double GKConfig::volume(int cluster) const {
    return volumes.empty() ? 1.0 : volumes[static_cast<std::size_t>(cluster)];
}

std::vector<int> FuzzyPartition::hard_assignments() const {
    std::vector<int> out(static_cast<std::size_t>(memberships.cols()));
    for (Eigen::Index k = 0; k < memberships.cols(); ++k) {
        Eigen::Index best = 0;
        memberships.col(k).maxCoeff(&best);
        out[static_cast<std::size_t>(k)] = static_cast<int>(best);
    }
    return out;
}

double distance(const Eigen::VectorXd& x, const Eigen::VectorXd& v, const Eigen::MatrixXd& A) {
    if (x.size() != v.size() || A.rows() != x.size() || A.cols() != x.size())
        throw InvalidArgument("distance: dimension mismatch");
    if (!x.allFinite() || !v.allFinite() || !A.allFinite())
        throw InvalidArgument("distance: non-finite input");
    const Eigen::VectorXd diff = x - v;
    return std::max(0.0, diff.dot(A * diff));
}

FuzzyPartition gk_cluster(const DataMatrix& data, const GKConfig& cfg) {
    cfg.validate();
    const auto N = data.rows();
    const auto n = data.cols();
    const int c = cfg.clusters;
    if (N < c) throw InvalidArgument("GK: need at least as many samples as clusters");
    if (n < 1) throw InvalidArgument("GK: data has no columns");
    if (!data.allFinite()) throw InvalidArgument("GK: data contains non-finite entries");

    const double m = cfg.fuzziness;

    Eigen::MatrixXd U(c, N);
    {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (Eigen::Index k = 0; k < N; ++k) {
            double total = 0.0;
            for (int i = 0; i < c; ++i) {
                U(i, k) = uni(rng) + 1e-12;
                total += U(i, k);
            }
            U.col(k) /= total;
        }
    }

    FuzzyPartition out;
    out.centers.resize(c, n);
    out.norms.assign(static_cast<std::size_t>(c), Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd d2(c, N);
    Eigen::MatrixXd U_next(c, N);

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        const Eigen::MatrixXd W = U.array().pow(m).matrix();

        for (int i = 0; i < c; ++i) {
            const double mass = W.row(i).sum();
            if (!(mass > 0.0)) {
                throw SingularCovariance(i, "cluster " + std::to_string(i) + " lost all membership mass");
            }
            const Eigen::RowVectorXd center = (W.row(i) * data) / mass;
            out.centers.row(i) = center;

            const Eigen::MatrixXd centered = data.rowwise() - center;
            const Eigen::MatrixXd F =
                (centered.transpose() * W.row(i).transpose().asDiagonal() * centered) / mass;
            out.norms[static_cast<std::size_t>(i)] =
                norm_from_covariance(F, cfg.volume(i), i, c == 1);

            const Eigen::MatrixXd& A = out.norms[static_cast<std::size_t>(i)];
            d2.row(i) = ((centered * A).array() * centered.array()).rowwise().sum().transpose().max(0.0);
        }

        update_memberships(d2, m, U_next);

        const double J = (U_next.array().pow(m) * d2.array()).sum();
        out.objective_history.push_back(J);

        const double change = (U_next - U).cwiseAbs().maxCoeff();
        U.swap(U_next);
        out.iterations = iter;
        out.objective = J;
        if (change < cfg.tol) {
            out.converged = true;
            break;
        }
    }

    out.memberships = std::move(U);
    return out;
}

}  // namespace ivfsmc
