#pragma once

// Side-by-side comparison of run metrics.

#include <string>
#include <vector>

#include <json.hpp>

#include "ivfsmc/scenario.hpp"

namespace ivfsmc {

struct ComparisonReport {
    std::vector<std::string> columns;   // one per run, "<controller> <disturbance>"
    std::vector<std::string> channels;  // union of channel names, first-seen order
    std::vector<std::vector<double>> mse;  // [channel][column], NaN when absent
    // Set only for a T1FC/IVFC pair: ivfc_better[c] is MSE(IVFC) <= MSE(T1FC).
    std::vector<bool> ivfc_better;
    bool is_pair = false;

    std::string table() const;
    nlohmann::json to_json() const;
};

ComparisonReport compare_report(const std::vector<RunMetrics>& runs);

// Runs grouped into tests of (IVFC, T1FC) pairs by disturbance, in input order.
struct DisturbanceGrid {
    std::vector<std::string> tests;     // disturbance spec per test
    std::vector<std::string> channels;
    // mse[channel][test] = {IVFC, T1FC}
    std::vector<std::vector<std::pair<double, double>>> mse;

    std::string table() const;
    nlohmann::json to_json() const;
};

DisturbanceGrid disturbance_grid(const std::vector<RunMetrics>& runs);

}  // namespace ivfsmc
