#pragma once

// JSON document format for identified TS models; see docs/formats.md.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ivfsmc/ts_model.hpp"

namespace ivfsmc {

inline constexpr const char* kModelFormat = "ivfsmc.ts_model";
inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const TSModel& model);
TSModel model_from_json(const nlohmann::json& doc);

void save_model(const TSModel& model, const std::filesystem::path& path);
TSModel load_model(const std::filesystem::path& path);

}  // namespace ivfsmc
