#include "ivfsmc/identification.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ivfsmc/errors.hpp"
#include "ivfsmc/model_io.hpp"

namespace ivfsmc {

AxisIdentification run_identification(const AxisDataset& data, const ModelBuildConfig& cfg) {
    if (data.valid.size() == 0) throw InvalidArgument("run_identification: validation split is empty");
    AxisIdentification out;
    out.axis = data.axis;
    out.target_name = data.target_name;

    ModelBuild t1 = build_model(data.ident, ModelKind::Type1, cfg);
    ModelBuild iv = build_model(data.ident, ModelKind::Interval, cfg);
    out.train_rmse_type1 = t1.training_rmse;
    out.train_rmse_interval = iv.training_rmse;
    out.valid_rmse_type1 = rmse(t1.model, data.valid);
    out.valid_rmse_interval = rmse(iv.model, data.valid);
    out.valid_maxabs_type1 = max_abs_error(t1.model, data.valid);
    out.valid_maxabs_interval = max_abs_error(iv.model, data.valid);
    out.type1 = std::move(t1.model);
    out.interval = std::move(iv.model);
    return out;
}

IdentificationReport run_identification(const IdentData& data, const ModelBuildConfig& cfg) {
    IdentificationReport r;
    for (std::size_t i = 0; i < 3; ++i) r.axes[i] = run_identification(data.sets[i], cfg);
    return r;
}

double max_abs_error(const TSModel& model, const RegressionData& data) {
    data.validate();
    double m = 0.0;
    for (Eigen::Index k = 0; k < data.size(); ++k)
        m = std::max(m, std::abs(data.targets(k) - infer(model, data.inputs.row(k).transpose())));
    return m;
}

std::array<double, 3> approximation_bounds(const IdentificationReport& report, ModelKind kind) {
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i)
        out[i] = kind == ModelKind::Type1 ? report.axes[i].valid_maxabs_type1 : report.axes[i].valid_maxabs_interval;
    return out;
}

std::string IdentificationReport::table() const {
    std::ostringstream os;
    os << std::left << std::setw(10) << "RMSE" << std::setw(12) << "T1FM" << "IVFM\n";
    os << std::fixed << std::setprecision(4);
    for (const auto& a : axes)
        os << std::setw(10) << a.target_name << std::setw(12) << a.valid_rmse_type1 << a.valid_rmse_interval << '\n';
    return os.str();
}

nlohmann::json IdentificationReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& a : axes) {
        rows.push_back({{"function", a.target_name},
                        {"axis", to_string(a.axis)},
                        {"train_rmse_t1fm", a.train_rmse_type1},
                        {"train_rmse_ivfm", a.train_rmse_interval},
                        {"valid_rmse_t1fm", a.valid_rmse_type1},
                        {"valid_rmse_ivfm", a.valid_rmse_interval},
                        {"valid_maxabs_t1fm", a.valid_maxabs_type1},
                        {"valid_maxabs_ivfm", a.valid_maxabs_interval}});
    }
    return {{"format", "ivfsmc.rmse_report"}, {"version", 1}, {"rows", rows}};
}

std::filesystem::path model_file_name(ModelKind kind, Axis axis) {
    return std::string("model_") + to_string(kind) + "_" + to_string(axis) + ".json";
}

void write_identification(const IdentificationReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& a : report.axes) {
        save_model(a.type1, dir / model_file_name(ModelKind::Type1, a.axis));
        save_model(a.interval, dir / model_file_name(ModelKind::Interval, a.axis));
    }
    std::ofstream js(dir / "rmse.json");
    js << report.to_json().dump(2) << '\n';
    std::ofstream txt(dir / "rmse.txt");
    txt << report.table();
    if (!js || !txt) throw IoError("cannot write the RMSE report to " + dir.string());
}

std::array<TSModel, 3> attitude_models(const IdentificationReport& report, ModelKind kind) {
    std::array<TSModel, 3> out;
    for (std::size_t i = 0; i < 3; ++i)
        out[i] = kind == ModelKind::Type1 ? report.axes[i].type1 : report.axes[i].interval;
    return out;
}

IdentificationReport identify_seed(std::uint64_t seed, IdentConfig data_cfg, ModelBuildConfig build_cfg) {
    data_cfg.seed = seed;
    build_cfg.clustering.seed = seed;
    return run_identification(generate_ident_data(data_cfg), build_cfg);
}

std::array<TSModel, 3> load_attitude_models(ModelKind kind, const std::filesystem::path& dir) {
    std::array<TSModel, 3> out;
    for (int i = 0; i < 3; ++i) {
        const Axis axis = static_cast<Axis>(i);
        out[static_cast<std::size_t>(i)] = load_model(dir / model_file_name(kind, axis));
        if (out[static_cast<std::size_t>(i)].kind() != kind)
            throw IoError((dir / model_file_name(kind, axis)).string() + ": model kind does not match its file name");
    }
    return out;
}

}  // namespace ivfsmc
