#include "ivfsmc/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "ivfsmc/errors.hpp"

namespace ivfsmc {

namespace {

constexpr double kLogFloor = 1e-6;
constexpr int kMaxRefinement = 50;
constexpr int kMaxHalvings = 30;
constexpr double kMinHeight = 1e-12;
constexpr double kMaxHeight = 1.0;

double sse_of(const ScatterSet& s, const GaussianMF& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = s.y(i) - g(s.x(i));
        acc += r * r;
    }
    return acc;
}

GaussianMF moment_start(const ScatterSet& s) {
    const auto& xs = s.xs();
    const auto& ys = s.ys();
    const auto peak = std::max_element(ys.begin(), ys.end()) - ys.begin();
    double wsum = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = std::max(ys[i], 0.0);
        wsum += w;
        mean += w * xs[i];
    }
    GaussianMF g;
    g.center = xs[static_cast<std::size_t>(peak)];
    g.height = std::clamp(ys[static_cast<std::size_t>(peak)], kMinHeight, kMaxHeight);
    double var = 0.0;
    if (wsum > 0.0) {
        mean /= wsum;
        for (std::size_t i = 0; i < xs.size(); ++i) var += std::max(ys[i], 0.0) * (xs[i] - mean) * (xs[i] - mean);
        var /= wsum;
    }
    const double span = xs.back() - xs.front();
    g.sigma = var > 0.0 ? std::sqrt(var) : span / 4.0;
    if (!(g.sigma > 0.0)) g.sigma = 1.0;
    return g;
}

// Weighted quadratic fit of ln y in a standardized abscissa. Weights y^2
// compensate for the log transform amplifying noise on small ordinates.
GaussianMF log_domain_start(const ScatterSet& s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    const double mean = std::accumulate(s.xs().begin(), s.xs().end(), 0.0) / static_cast<double>(n);
    double scale = 0.0;
    for (double x : s.xs()) scale = std::max(scale, std::abs(x - mean));
    if (!(scale > 0.0)) scale = 1.0;

    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y = std::max(s.y(static_cast<std::size_t>(i)), kLogFloor);
        const double u = (s.x(static_cast<std::size_t>(i)) - mean) / scale;
        const double w = y;  // sqrt of the y^2 weight
        A(i, 0) = w;
        A(i, 1) = w * u;
        A(i, 2) = w * u * u;
        b(i) = w * std::log(y);
    }
    const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(b);
    const double a0 = coef(0), a1 = coef(1), a2 = coef(2);
    if (!(a2 < 0.0) || !std::isfinite(a0 + a1 + a2)) return moment_start(s);

    GaussianMF g;
    const double cu = -a1 / (2.0 * a2);
    g.center = mean + cu * scale;
    g.sigma = scale * std::sqrt(-1.0 / (2.0 * a2));
    g.height = std::exp(a0 - a1 * a1 / (4.0 * a2));
    if (!std::isfinite(g.center) || !std::isfinite(g.sigma) || !std::isfinite(g.height) || !(g.sigma > 0.0)) {
        return moment_start(s);
    }
    g.height = std::clamp(g.height, kMinHeight, kMaxHeight);
    return g;
}

}  // namespace

ScatterSet::ScatterSet(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size()) throw InvalidArgument("ScatterSet: xs and ys differ in length");
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i]))
            throw InvalidArgument("ScatterSet: non-finite point");
        if (i > 0 && !(xs_[i] > xs_[i - 1]))
            throw InvalidArgument("ScatterSet: abscissae must be strictly increasing (duplicate x?)");
    }
}

ScatterSet ScatterSet::prepare(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("ScatterSet: xs and ys differ in length");
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

    std::vector<double> sx;
    std::vector<double> sy;
    sx.reserve(xs.size());
    sy.reserve(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        const double x = xs[order[i]];
        double acc = 0.0;
        std::size_t j = i;
        while (j < order.size() && xs[order[j]] == x) acc += ys[order[j++]];
        sx.push_back(x);
        sy.push_back(acc / static_cast<double>(j - i));
        i = j;
    }
    return ScatterSet(std::move(sx), std::move(sy));
}

double GaussianMF::operator()(double x) const {
    const double z = (x - center) / sigma;
    return height * std::exp(-0.5 * z * z);
}

bool IntervalGaussianMF::is_type1() const {
    return lower.center == upper.center && lower.sigma == upper.sigma && lower.height == upper.height;
}

EnvelopePair eda_once(const ScatterSet& s) {
    if (s.size() < 2) throw InvalidArgument("EDA: need at least two points");
    std::vector<double> ux{s.x(0)}, uy{s.y(0)}, lx{s.x(0)}, ly{s.y(0)};
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double dx = s.x(i + 1) - s.x(i);
        if (!(dx > 0.0)) throw InvalidArgument("EDA: slope undefined for duplicate abscissa");
        const double slope = (s.y(i + 1) - s.y(i)) / dx;
        if (slope >= 0.0) {
            ux.push_back(s.x(i + 1));
            uy.push_back(s.y(i + 1));
        }
        if (slope <= 0.0) {
            lx.push_back(s.x(i + 1));
            ly.push_back(s.y(i + 1));
        }
    }
    return {ScatterSet(std::move(ux), std::move(uy)), ScatterSet(std::move(lx), std::move(ly))};
}

EnvelopePair eda_iterated(const ScatterSet& s, int upper_passes, int lower_passes) {
    if (upper_passes < 1 || lower_passes < 1) throw InvalidArgument("EDA: pass counts must be >= 1");
    EnvelopePair pair = eda_once(s);
    for (int i = 1; i < upper_passes && pair.upper.size() >= 2; ++i) {
        ScatterSet next = eda_once(pair.upper).upper;
        if (next.size() < 2) break;
        pair.upper = std::move(next);
    }
    for (int j = 1; j < lower_passes && pair.lower.size() >= 2; ++j) {
        ScatterSet next = eda_once(pair.lower).lower;
        if (next.size() < 2) break;
        pair.lower = std::move(next);
    }
    return pair;
}

GaussianFit fit_gaussian(const ScatterSet& s) {
    if (s.size() < 3) throw DegenerateFit("Gaussian fit needs at least three points");
    const auto [lo, hi] = std::minmax_element(s.ys().begin(), s.ys().end());
    if (*lo == *hi) {
        throw DegenerateFit("Gaussian fit: all ordinates equal, spread is unidentifiable; widen the data");
    }

    GaussianMF g = log_domain_start(s);
    double sse = sse_of(s, g);
    {
        const GaussianMF alt = moment_start(s);
        const double alt_sse = sse_of(s, alt);
        if (alt_sse < sse) {
            g = alt;
            sse = alt_sse;
        }
    }

    const auto n = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd J(n, 3);
    Eigen::VectorXd r(n);
    int steps = 0;
    for (; steps < kMaxRefinement; ++steps) {
        const double inv_s2 = 1.0 / (g.sigma * g.sigma);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = s.x(static_cast<std::size_t>(i));
            const double d = x - g.center;
            const double e = std::exp(-0.5 * d * d * inv_s2);
            const double model = g.height * e;
            r(i) = s.y(static_cast<std::size_t>(i)) - model;
            J(i, 0) = e;                             // d/dh
            J(i, 1) = model * d * inv_s2;            // d/dc
            J(i, 2) = model * d * d * inv_s2;        // d/d(log sigma)
        }
        Eigen::Vector3d delta = J.completeOrthogonalDecomposition().solve(r);
        if (!delta.allFinite()) break;

        bool improved = false;
        double t = 1.0;
        for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
            GaussianMF trial;
            trial.height = std::clamp(g.height + t * delta(0), kMinHeight, kMaxHeight);
            trial.center = g.center + t * delta(1);
            trial.sigma = g.sigma * std::exp(std::clamp(t * delta(2), -5.0, 5.0));
            const double trial_sse = sse_of(s, trial);
            if (std::isfinite(trial_sse) && trial_sse < sse) {
                const double gain = sse - trial_sse;
                g = trial;
                sse = trial_sse;
                improved = gain > 1e-15 * (1.0 + sse);
                break;
            }
        }
        if (!improved) break;
    }

    GaussianFit fit;
    fit.mf = g;
    fit.sse = sse;
    fit.rmse = std::sqrt(sse / static_cast<double>(s.size()));
    fit.refinement_steps = steps;
    return fit;
}

int crossing_count(const GaussianMF& lower, const GaussianMF& upper, double x_min, double x_max, int grid) {
    if (grid < 2) throw InvalidArgument("crossing_count: grid needs at least two points");
    int count = 0;
    int previous = 0;
    for (int i = 0; i < grid; ++i) {
        const double x = x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(grid - 1);
        const double gap = upper(x) - lower(x);
        const int sign = gap > 1e-12 ? 1 : (gap < -1e-12 ? -1 : 0);
        if (sign != 0) {
            if (previous != 0 && sign != previous) ++count;
            previous = sign;
        }
    }
    return count;
}

namespace {

// min over [a, b] of upper(x) / lower(x). The log of the ratio is quadratic
// in x, so the minimum sits at an end point or at the vertex.
double min_ratio(const GaussianMF& lower, const GaussianMF& upper, double a, double b) {
    auto log_ratio = [&](double x) {
        return std::log(upper.height / lower.height) - 0.5 * std::pow((x - upper.center) / upper.sigma, 2) +
               0.5 * std::pow((x - lower.center) / lower.sigma, 2);
    };
    double best = std::min(log_ratio(a), log_ratio(b));
    const double curv = 1.0 / (lower.sigma * lower.sigma) - 1.0 / (upper.sigma * upper.sigma);
    if (curv > 0.0) {
        const double xv = (lower.center / (lower.sigma * lower.sigma) - upper.center / (upper.sigma * upper.sigma)) / curv;
        if (xv > a && xv < b) best = std::min(best, log_ratio(xv));
    }
    // Shave a few ulps so rounding in exp() cannot undo the repair.
    return std::exp(best) * (1.0 - 1e-12);
}

}  // namespace

IntervalBuild build_interval_mf_detailed(const ScatterSet& cloud, const EnvelopeConfig& cfg) {
    if (cloud.size() < 3) throw DegenerateFit("interval MF: cloud needs at least three points");
    IntervalBuild out;
    out.envelopes = eda_iterated(cloud, cfg.upper_passes, cfg.lower_passes);
    out.raw_upper = fit_gaussian(out.envelopes.upper).mf;
    out.raw_lower = fit_gaussian(out.envelopes.lower).mf;

    const double x_min = cloud.xs().front();
    const double x_max = cloud.xs().back();
    constexpr int kGrid = 1000;
    out.crossings = crossing_count(out.raw_lower, out.raw_upper, x_min, x_max, kGrid);

    const double factor = std::min(1.0, min_ratio(out.raw_lower, out.raw_upper, x_min, x_max));
    out.repair_factor = factor;
    out.mf.upper = out.raw_upper;
    out.mf.lower = out.raw_lower;
    out.mf.lower.height = std::max(out.raw_lower.height * factor, kMinHeight);
    return out;
}

IntervalGaussianMF build_interval_mf(const ScatterSet& cloud, int upper_passes, int lower_passes) {
    return build_interval_mf_detailed(cloud, EnvelopeConfig{upper_passes, lower_passes}).mf;
}

}  // namespace ivfsmc
