#include "ivfsmc/model_io.hpp"

#include <fstream>

#include "ivfsmc/errors.hpp"

namespace ivfsmc {

namespace {

nlohmann::json gaussian_json(const GaussianMF& g) {
    return {{"center", g.center}, {"sigma", g.sigma}, {"height", g.height}};
}

GaussianMF gaussian_from(const nlohmann::json& j) {
    return {j.at("center").get<double>(), j.at("sigma").get<double>(), j.at("height").get<double>()};
}

}  // namespace

nlohmann::json model_to_json(const TSModel& model) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& rule : model.rules()) {
        nlohmann::json ants = nlohmann::json::array();
        for (const auto& mf : rule.antecedents) {
            ants.push_back({{"lower", gaussian_json(mf.lower)}, {"upper", gaussian_json(mf.upper)}});
        }
        std::vector<double> slope(rule.slope.data(), rule.slope.data() + rule.slope.size());
        rules.push_back({{"antecedents", ants}, {"slope", slope}, {"offset", rule.offset}});
    }
    return {
        {"format", kModelFormat},
        {"version", kModelFormatVersion},
        {"kind", to_string(model.kind())},
        {"input_dim", model.input_dim()},
        {"rule_count", model.rule_count()},
        {"seed", model.metadata.seed},
        {"training_rmse", model.metadata.training_rmse},
        {"rank_deficient", model.metadata.rank_deficient},
        {"rules", rules},
    };
}

TSModel model_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<std::string>() != kModelFormat)
            throw IoError("model document has an unexpected format tag");
        if (doc.at("version").get<int>() != kModelFormatVersion)
            throw IoError("unsupported model document version");
        const int n = doc.at("input_dim").get<int>();
        std::vector<TSRule> rules;
        for (const auto& r : doc.at("rules")) {
            TSRule rule;
            for (const auto& a : r.at("antecedents")) {
                rule.antecedents.push_back({gaussian_from(a.at("lower")), gaussian_from(a.at("upper"))});
            }
            const auto slope = r.at("slope").get<std::vector<double>>();
            rule.slope = Eigen::Map<const Eigen::VectorXd>(slope.data(), static_cast<Eigen::Index>(slope.size()));
            rule.offset = r.at("offset").get<double>();
            rules.push_back(std::move(rule));
        }
        if (static_cast<int>(rules.size()) != doc.at("rule_count").get<int>())
            throw IoError("model document: rule_count does not match the rule list");
        TSModel model(model_kind_from_string(doc.at("kind").get<std::string>()), n, std::move(rules));
        model.metadata.seed = doc.at("seed").get<std::uint64_t>();
        model.metadata.training_rmse = doc.at("training_rmse").get<double>();
        model.metadata.rank_deficient = doc.at("rank_deficient").get<bool>();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed model document: ") + e.what());
    }
}

void save_model(const TSModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << model_to_json(model).dump(2) << '\n';
}

TSModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return model_from_json(doc);
}

}  // namespace ivfsmc
