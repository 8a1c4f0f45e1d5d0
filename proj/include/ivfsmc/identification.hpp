#pragma once

// Builds the type-1 and interval models for each attitude drift term and
// scores them on the held-out split.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "ivfsmc/ident_data.hpp"
#include "ivfsmc/ts_model.hpp"

namespace ivfsmc {

struct AxisIdentification {
    Axis axis = Axis::Roll;
    std::string target_name;
    TSModel type1;
    TSModel interval;
    double train_rmse_type1 = 0.0;
    double train_rmse_interval = 0.0;
    double valid_rmse_type1 = 0.0;
    double valid_rmse_interval = 0.0;
    // max |target - prediction| on the validation split
    double valid_maxabs_type1 = 0.0;
    double valid_maxabs_interval = 0.0;
};

AxisIdentification run_identification(const AxisDataset& data, const ModelBuildConfig& cfg);

struct IdentificationReport {
    std::array<AxisIdentification, 3> axes;

    // Validation RMSE table: one row per function, columns T1FM and IVFM.
    std::string table() const;
    nlohmann::json to_json() const;
};

IdentificationReport run_identification(const IdentData& data, const ModelBuildConfig& cfg);

double max_abs_error(const TSModel& model, const RegressionData& data);

// Per-axis validation max error of the chosen model kind, usable as Wf.
std::array<double, 3> approximation_bounds(const IdentificationReport& report, ModelKind kind);

// Writes model_<kind>_<axis>.json for all six models plus rmse.json and rmse.txt.
void write_identification(const IdentificationReport& report, const std::filesystem::path& dir);

std::filesystem::path model_file_name(ModelKind kind, Axis axis);

// The three drift models of one kind, as saved by write_identification.
// Models of one kind for roll, pitch, yaw.
std::array<TSModel, 3> attitude_models(const IdentificationReport& report, ModelKind kind);

// generate_ident_data + run_identification, with the clustering seeded from
// the data seed.
IdentificationReport identify_seed(std::uint64_t seed, IdentConfig data_cfg = {}, ModelBuildConfig build_cfg = {});

std::array<TSModel, 3> load_attitude_models(ModelKind kind, const std::filesystem::path& dir);

}  // namespace ivfsmc
