#pragma once

// Gustafson-Kessel fuzzy clustering.
//
// Every cluster carries its own norm-inducing matrix A_i with a fixed
// determinant (the cluster "volume"), so clusters adapt their shape to the
// local covariance of the data instead of being forced into spheres.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ivfsmc {

// N x n sample matrix, one sample per row.
using DataMatrix = Eigen::MatrixXd;

struct GKConfig {
    int clusters = 3;
    double fuzziness = 2.0;  // m > 1
    double tol = 1e-6;       // stop when max |U_new - U| < tol
    int max_iter = 300;
    std::uint64_t seed = 0;
    // Per-cluster volume rho_i; empty means 1 for every cluster.
    std::vector<double> volumes;

    void validate() const;
    double volume(int cluster) const;
};

struct FuzzyPartition {
    Eigen::MatrixXd memberships;          // c x N
    Eigen::MatrixXd centers;              // c x n
    std::vector<Eigen::MatrixXd> norms;   // c matrices, n x n, SPD, det = rho_i
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_history;  // J after every membership update

    int clusters() const { return static_cast<int>(memberships.rows()); }

    // argmax_i mu_ik for each sample.
    std::vector<int> hard_assignments() const;
};

// (x - v)^T A (x - v). Throws InvalidArgument on non-finite input.
double distance(const Eigen::VectorXd& x, const Eigen::VectorXd& v, const Eigen::MatrixXd& A);

FuzzyPartition gk_cluster(const DataMatrix& data, const GKConfig& cfg);

}  // namespace ivfsmc
