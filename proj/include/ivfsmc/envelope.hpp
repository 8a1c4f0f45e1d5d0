#pragma once

// Slope-sign envelope detection over a scattered point cloud and the
// Gaussian fits that turn the two envelopes into an interval type-2
// membership function.

#include <cstddef>
#include <vector>

namespace ivfsmc {

// Points sorted by strictly increasing abscissa.
class ScatterSet {
public:
    ScatterSet() = default;

    // Takes points that are already strictly increasing in x; throws otherwise.
    ScatterSet(std::vector<double> xs, std::vector<double> ys);

    // Sorts by x and merges duplicate abscissae by averaging their ordinates.
    static ScatterSet prepare(std::vector<double> xs, std::vector<double> ys);

    std::size_t size() const { return xs_.size(); }
    bool empty() const { return xs_.empty(); }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }
    double x(std::size_t i) const { return xs_[i]; }
    double y(std::size_t i) const { return ys_[i]; }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

struct EnvelopePair {
    ScatterSet upper;
    ScatterSet lower;
};

struct GaussianMF {
    double center = 0.0;
    double sigma = 1.0;
    double height = 1.0;

    double operator()(double x) const;
};

struct GaussianFit {
    GaussianMF mf;
    double sse = 0.0;
    double rmse = 0.0;
    int refinement_steps = 0;
};

struct IntervalGaussianMF {
    GaussianMF lower;
    GaussianMF upper;

    double lower_at(double x) const { return lower(x); }
    double upper_at(double x) const { return upper(x); }
    bool is_type1() const;
};

struct IntervalBuild {
    IntervalGaussianMF mf;        // after dominance repair
    GaussianMF raw_lower;         // fits before repair
    GaussianMF raw_upper;
    int crossings = 0;            // sign changes of (upper - lower) before repair
    double repair_factor = 1.0;   // factor applied to the lower height
    EnvelopePair envelopes;
};

struct EnvelopeConfig {
    int upper_passes = 2;   // i_max
    int lower_passes = 2;   // j_max
};

// One slope-sign pass. The first point seeds both envelopes, a rising segment
// sends its right endpoint to `upper`, a falling one to `lower`, a flat one to
// both.
EnvelopePair eda_once(const ScatterSet& s);

// Re-applies eda_once to the running upper set (upper_passes - 1 more times)
// and to the running lower set (lower_passes - 1 more times). A set that
// shrinks below two points stops its own refinement.
EnvelopePair eda_iterated(const ScatterSet& s, int upper_passes, int lower_passes);

// Least-squares fit of h exp(-(x-c)^2 / (2 sigma^2)): log-domain weighted
// quadratic for the start point, then Gauss-Newton with step halving.
GaussianFit fit_gaussian(const ScatterSet& s);

// Sign changes of (upper - lower) on an evenly spaced grid.
int crossing_count(const GaussianMF& lower, const GaussianMF& upper, double x_min, double x_max,
                   int grid = 1000);

IntervalBuild build_interval_mf_detailed(const ScatterSet& cloud, const EnvelopeConfig& cfg);

IntervalGaussianMF build_interval_mf(const ScatterSet& cloud, int upper_passes, int lower_passes);

}  // namespace ivfsmc
