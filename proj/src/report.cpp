#include "ivfsmc/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ivfsmc/errors.hpp"

namespace ivfsmc {

using nlohmann::json;

namespace {

std::vector<std::string> channel_union(const std::vector<RunMetrics>& runs) {
    std::vector<std::string> out;
    for (const auto& r : runs)
        for (const auto& c : r.channels)
            if (std::find(out.begin(), out.end(), c.name) == out.end()) out.push_back(c.name);
    return out;
}

double mse_of(const RunMetrics& r, const std::string& name) {
    for (const auto& c : r.channels)
        if (c.name == name) return c.mse;
    return std::numeric_limits<double>::quiet_NaN();
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

ComparisonReport compare_report(const std::vector<RunMetrics>& runs) {
    if (runs.empty()) throw InvalidArgument("compare_report: need at least one run");
    ComparisonReport rep;
    for (const auto& r : runs) rep.columns.push_back(r.controller + " " + r.disturbance);
    rep.channels = channel_union(runs);
    for (const auto& name : rep.channels) {
        std::vector<double> row;
        for (const auto& r : runs) row.push_back(mse_of(r, name));
        rep.mse.push_back(std::move(row));
    }
    if (runs.size() == 2 && runs[0].controller != runs[1].controller) {
        rep.is_pair = true;
        const std::size_t iv = runs[0].controller == "ivfc" ? 0 : 1;
        for (const auto& row : rep.mse) rep.ivfc_better.push_back(row[iv] <= row[1 - iv]);
    }
    return rep;
}

std::string ComparisonReport::table() const {
    std::ostringstream os;
    os << std::left << std::setw(8) << "MSE";
    for (const auto& c : columns) os << std::setw(std::max<int>(14, static_cast<int>(c.size()) + 2)) << c;
    if (is_pair) os << "IVFC<=T1FC";
    os << '\n' << std::scientific << std::setprecision(4);
    for (std::size_t i = 0; i < channels.size(); ++i) {
        os << std::setw(8) << channels[i];
        for (std::size_t j = 0; j < columns.size(); ++j)
            os << std::setw(std::max<int>(14, static_cast<int>(columns[j].size()) + 2)) << mse[i][j];
        if (is_pair) os << (ivfc_better[i] ? "yes" : "no");
        os << '\n';
    }
    return os.str();
}

json ComparisonReport::to_json() const {
    json rows = json::array();
    for (std::size_t i = 0; i < channels.size(); ++i) {
        json vals = json::array();
        for (double v : mse[i]) vals.push_back(number_or_null(v));
        json row = {{"channel", channels[i]}, {"mse", vals}};
        if (is_pair) row["ivfc_le_t1fc"] = static_cast<bool>(ivfc_better[i]);
        rows.push_back(row);
    }
    return {{"format", "ivfsmc.comparison"}, {"version", 1}, {"columns", columns}, {"rows", rows}};
}

DisturbanceGrid disturbance_grid(const std::vector<RunMetrics>& runs) {
    DisturbanceGrid g;
    for (const auto& r : runs)
        if (std::find(g.tests.begin(), g.tests.end(), r.disturbance) == g.tests.end()) g.tests.push_back(r.disturbance);
    g.channels = channel_union(runs);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    g.mse.assign(g.channels.size(), std::vector<std::pair<double, double>>(g.tests.size(), {nan, nan}));
    for (const auto& r : runs) {
        const auto t = static_cast<std::size_t>(std::find(g.tests.begin(), g.tests.end(), r.disturbance) - g.tests.begin());
        for (std::size_t c = 0; c < g.channels.size(); ++c) {
            auto& cell = g.mse[c][t];
            (r.controller == "ivfc" ? cell.first : cell.second) = mse_of(r, g.channels[c]);
        }
    }
    return g;
}

std::string DisturbanceGrid::table() const {
    std::ostringstream os;
    os << std::left << std::setw(8) << "";
    for (std::size_t t = 0; t < tests.size(); ++t) os << std::setw(26) << ("test " + std::to_string(t + 1));
    os << '\n' << std::setw(8) << "MSE";
    for (std::size_t t = 0; t < tests.size(); ++t) os << std::setw(13) << "IVFC" << std::setw(13) << "T1FC";
    os << '\n' << std::scientific << std::setprecision(4);
    for (std::size_t c = 0; c < channels.size(); ++c) {
        os << std::setw(8) << channels[c];
        for (const auto& cell : mse[c]) os << std::setw(13) << cell.first << std::setw(13) << cell.second;
        os << '\n';
    }
    for (std::size_t t = 0; t < tests.size(); ++t) os << "test " << t + 1 << ": " << tests[t] << '\n';
    return os.str();
}

json DisturbanceGrid::to_json() const {
    json rows = json::array();
    for (std::size_t c = 0; c < channels.size(); ++c) {
        json cells = json::array();
        for (const auto& cell : mse[c])
            cells.push_back({{"ivfc", number_or_null(cell.first)}, {"t1fc", number_or_null(cell.second)}});
        rows.push_back({{"channel", channels[c]}, {"tests", cells}});
    }
    return {{"format", "ivfsmc.disturbance_grid"}, {"version", 1}, {"tests", tests}, {"rows", rows}};
}

}  // namespace ivfsmc
