#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ivfsmc/clustering.hpp"
#include "ivfsmc/errors.hpp"

using namespace ivfsmc;

namespace {

// Plain fuzzy c-means with Euclidean norms, used as an independent oracle for
// hard assignments on well-separated data.
Eigen::MatrixXd fcm_memberships(const Eigen::MatrixXd& X, int c, double m, unsigned seed) {
    const Eigen::Index N = X.rows();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Eigen::MatrixXd U(c, N);
    for (Eigen::Index k = 0; k < N; ++k) {
        for (int i = 0; i < c; ++i) U(i, k) = uni(rng);
        U.col(k) /= U.col(k).sum();
    }
    for (int it = 0; it < 200; ++it) {
        const Eigen::MatrixXd W = U.array().pow(m);
        Eigen::MatrixXd V = (W * X).array().colwise() / W.rowwise().sum().array();
        for (Eigen::Index k = 0; k < N; ++k) {
            std::vector<double> d(static_cast<std::size_t>(c));
            for (int i = 0; i < c; ++i) d[static_cast<std::size_t>(i)] = (X.row(k) - V.row(i)).squaredNorm() + 1e-300;
            for (int i = 0; i < c; ++i) {
                double s = 0.0;
                for (int j = 0; j < c; ++j)
                    s += std::pow(d[static_cast<std::size_t>(i)] / d[static_cast<std::size_t>(j)], 1.0 / (m - 1.0));
                U(i, k) = 1.0 / s;
            }
        }
    }
    return U;
}

std::vector<int> argmax_cols(const Eigen::MatrixXd& U) {
    std::vector<int> out;
    for (Eigen::Index k = 0; k < U.cols(); ++k) {
        Eigen::Index i = 0;
        U.col(k).maxCoeff(&i);
        out.push_back(static_cast<int>(i));
    }
    return out;
}

Eigen::MatrixXd two_blobs(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    Eigen::MatrixXd X(20, 2);
    for (int k = 0; k < 20; ++k) {
        const double base = k < 10 ? 0.0 : 10.0;
        X(k, 0) = base + jitter(rng);
        X(k, 1) = base + jitter(rng);
    }
    return X;
}

// Same partition up to a relabelling of clusters.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::vector<int> map(16, -1);
    for (std::size_t k = 0; k < a.size(); ++k) {
        int& m = map[static_cast<std::size_t>(a[k])];
        if (m == -1) m = b[k];
        if (m != b[k]) return false;
    }
    return true;
}

}  // namespace

TEST(Distance, IdentityCase) {
    Eigen::Vector2d x(0.3, -1.2);
    EXPECT_EQ(distance(x, x, Eigen::Matrix2d::Identity()), 0.0);
}

TEST(Distance, EuclideanReduction) {
    EXPECT_DOUBLE_EQ(distance(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0), Eigen::Matrix2d::Identity()), 1.0);
}

TEST(Distance, QuadraticForm) {
    Eigen::Matrix2d A = Eigen::Vector2d(2, 3).asDiagonal();
    // 2*1^2 + 3*1^2
    EXPECT_DOUBLE_EQ(distance(Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0), A), 5.0);
}

TEST(Distance, SymmetricAndPositive) {
    std::mt19937 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        Eigen::Matrix3d B;
        for (int i = 0; i < 9; ++i) B(i / 3, i % 3) = n(rng);
        const Eigen::Matrix3d A = B * B.transpose() + 0.1 * Eigen::Matrix3d::Identity();
        Eigen::Vector3d x(n(rng), n(rng), n(rng)), v(n(rng), n(rng), n(rng));
        EXPECT_NEAR(distance(x, v, A), distance(v, x, A), 1e-12);
        EXPECT_GT(distance(x, v, A), 0.0);
    }
}

TEST(Distance, RejectsNonFinite) {
    Eigen::Vector2d bad(std::nan(""), 0.0);
    EXPECT_THROW(distance(bad, Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()), InvalidArgument);
}

TEST(GK, SingleClusterOfIdenticalPoints) {
    Eigen::MatrixXd X(8, 2);
    X.col(0).setConstant(1.0);
    X.col(1).setConstant(2.0);
    GKConfig cfg;
    cfg.clusters = 1;
    const FuzzyPartition p = gk_cluster(X, cfg);
    EXPECT_NEAR(p.centers(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(p.centers(0, 1), 2.0, 1e-12);
    EXPECT_TRUE((p.memberships.array() == 1.0).all());
    EXPECT_NEAR(p.objective, 0.0, 1e-12);
}

TEST(GK, TwoBlobsAgreeWithFcmOracle) {
    const Eigen::MatrixXd X = two_blobs(3);
    GKConfig cfg;
    cfg.clusters = 2;
    cfg.seed = 11;
    const FuzzyPartition p = gk_cluster(X, cfg);
    const auto gk = p.hard_assignments();
    const auto fcm = argmax_cols(fcm_memberships(X, 2, 2.0, 5));
    EXPECT_TRUE(same_partition(gk, fcm));
    for (Eigen::Index k = 0; k < X.rows(); ++k)
        EXPECT_GT(p.memberships(gk[static_cast<std::size_t>(k)], k), 0.99);
}

TEST(GK, NormMatricesHaveClusterVolume) {
    const Eigen::MatrixXd X = two_blobs(4);
    GKConfig cfg;
    cfg.clusters = 2;
    cfg.volumes = {1.0, 2.5};
    const FuzzyPartition p = gk_cluster(X, cfg);
    for (int i = 0; i < 2; ++i) {
        const Eigen::MatrixXd& A = p.norms[static_cast<std::size_t>(i)];
        EXPECT_NEAR((A - A.transpose()).norm(), 0.0, 1e-9 * A.norm());
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues().minCoeff(), 0.0);
        EXPECT_NEAR(A.determinant(), cfg.volumes[static_cast<std::size_t>(i)],
                    1e-6 * cfg.volumes[static_cast<std::size_t>(i)]);
    }
}

TEST(GK, HardAssignmentsInvariantUnderDiagonalScaling) {
    const Eigen::MatrixXd X = two_blobs(5);
    GKConfig cfg;
    cfg.clusters = 2;
    cfg.seed = 9;
    const auto base = gk_cluster(X, cfg).hard_assignments();
    for (const auto& d : {Eigen::Vector2d(10.0, 1.0), Eigen::Vector2d(0.1, 3.0), Eigen::Vector2d(-2.0, 0.5)}) {
        const Eigen::MatrixXd Xs = X * d.asDiagonal();
        EXPECT_TRUE(same_partition(base, gk_cluster(Xs, cfg).hard_assignments()));
    }
}

TEST(GK, SameSeedIsDeterministic) {
    std::mt19937 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd X(60, 3);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = n(rng);
    GKConfig cfg;
    cfg.seed = 42;
    const auto a = gk_cluster(X, cfg);
    const auto b = gk_cluster(X, cfg);
    EXPECT_EQ(a.memberships, b.memberships);
    EXPECT_EQ(a.centers, b.centers);
}

TEST(GK, RejectsInvalidInput) {
    Eigen::MatrixXd X(2, 2);
    X << 0, 0, 1, 1;
    GKConfig cfg;
    cfg.clusters = 3;
    EXPECT_THROW(gk_cluster(X, cfg), InvalidArgument);  // N < c
    cfg.clusters = 1;
    cfg.fuzziness = 1.0;
    EXPECT_THROW(gk_cluster(X, cfg), InvalidArgument);
    cfg.fuzziness = 2.0;
    cfg.tol = 0.0;
    EXPECT_THROW(gk_cluster(X, cfg), InvalidArgument);
    cfg.tol = 1e-6;
    X(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(gk_cluster(X, cfg), InvalidArgument);
}

// Column-stochasticity and objective monotonicity on 100 random datasets.
TEST(GKProperty, StochasticColumnsAndMonotoneObjective) {
    std::mt19937 rng(2024);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_int_distribution<int> dims(2, 4), clusters(1, 4), blobs(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = dims(rng);
        const int nb = blobs(rng);
        Eigen::MatrixXd X(60, dim);
        for (Eigen::Index k = 0; k < X.rows(); ++k) {
            const double shift = 4.0 * static_cast<double>(k % nb);
            for (int j = 0; j < dim; ++j) X(k, j) = shift + n(rng) * (0.3 + 0.7 * j);
        }
        GKConfig cfg;
        cfg.clusters = clusters(rng);
        cfg.seed = static_cast<std::uint64_t>(trial);
        const FuzzyPartition p = gk_cluster(X, cfg);
        ASSERT_TRUE((p.memberships.array() >= 0.0).all() && (p.memberships.array() <= 1.0).all()) << trial;
        for (Eigen::Index k = 0; k < X.rows(); ++k) ASSERT_NEAR(p.memberships.col(k).sum(), 1.0, 1e-9) << trial;
        for (std::size_t t = 1; t < p.objective_history.size(); ++t)
            ASSERT_LE(p.objective_history[t], p.objective_history[t - 1] + 1e-9) << "trial " << trial << " iter " << t;
    }
}
