// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------

#pragma once

#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>
#include <json.hpp>

#include "../common.hpp"
#include "discriminant.hpp"
#include "features.hpp"
#include "linear_svm.hpp"
#include "logreg.hpp"
#include "rbf_svm.hpp"

namespace nlosid::ml {

enum class ModelKind { LR, LDA, QDA, LinearSVM, RbfSVM };

inline constexpr std::array<ModelKind, 5> all_model_kinds{ModelKind::LR, ModelKind::LDA, ModelKind::QDA,
                                                          ModelKind::LinearSVM, ModelKind::RbfSVM};

inline std::string_view to_string(ModelKind k) noexcept {
    switch (k) {
        case ModelKind::LR: return "LR";
        case ModelKind::LDA: return "LDA";
        case ModelKind::QDA: return "QDA";
        case ModelKind::LinearSVM: return "LinearSVM";
        case ModelKind::RbfSVM: return "RbfSVM";
    }
    return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
    for (auto k : all_model_kinds)
        if (to_string(k) == s) return k;
    throw parse_error("unknown model kind '" + std::string(s) + "'");
}

struct ClassifierModel {
    std::variant<LogRegModel, DiscriminantModel, LinearSvmModel, RbfSvmModel> params;
    FeatureMode feature_mode = FeatureMode::Pathloss2D;
    double carrier_freq = 2.4e9;
    std::map<std::string, double> hyperparameters;  // as selected on validation
    std::string snr_level;

    ModelKind kind() const {
        switch (params.index()) {
            case 0: return ModelKind::LR;
            case 1:
                return std::get<DiscriminantModel>(params).kind == DiscriminantKind::Linear ? ModelKind::LDA
                                                                                             : ModelKind::QDA;
            case 2: return ModelKind::LinearSVM;
            default: return ModelKind::RbfSVM;
        }
    }

    Eigen::Index dim() const {
        return std::visit([](const auto& m) { return m.standardizer.dim(); }, params);
    }

    /// Continuous score, higher = more NLOS.
    double decision_score(const Eigen::VectorXd& x) const {
        if (x.size() != dim())
            throw invalid_argument("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                                   std::to_string(dim()));
        return std::visit([&](const auto& m) { return m.score(x); }, params);
    }

    Label predict(const Eigen::VectorXd& x) const { return decision_score(x) > 0.0 ? Label::Nlos : Label::Los; }
};

// ----- JSON persistence ------------------------------------------------------

inline constexpr int model_format_version = 1;

namespace detail {

inline nlohmann::json to_json(const Eigen::VectorXd& v) {
    return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline nlohmann::json to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        rows.push_back(row);
    }
    return rows;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto row = j[r].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != cols) throw parse_error("ragged matrix in model file");
        for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

inline nlohmann::json to_json(const Standardizer& s) { return {{"mean", to_json(s.mean)}, {"std", to_json(s.std)}}; }

inline Standardizer standardizer_from_json(const nlohmann::json& j) {
    return {vector_from_json(j.at("mean")), vector_from_json(j.at("std"))};
}

}  // namespace detail

inline nlohmann::json to_json(const ClassifierModel& model) {
    using detail::to_json;
    nlohmann::json j;
    j["format"] = "nlosid-model";
    j["version"] = model_format_version;
    j["kind"] = std::string(to_string(model.kind()));
    j["feature_mode"] = std::string(to_string(model.feature_mode));
    j["carrier_freq"] = model.carrier_freq;
    j["snr_level"] = model.snr_level;
    j["hyperparameters"] = model.hyperparameters;
    nlohmann::json p;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            p["standardizer"] = to_json(m.standardizer);
            if constexpr (std::is_same_v<T, LogRegModel>) {
                p["weights"] = to_json(m.weights);
                p["bias"] = m.bias;
            } else if constexpr (std::is_same_v<T, DiscriminantModel>) {
                nlohmann::json classes = nlohmann::json::array();
                for (const auto& c : m.classes)
                    classes.push_back({{"mean", to_json(c.mean)},
                                       {"cov", to_json(c.cov)},
                                       {"prior", c.prior},
                                       {"regularized", c.regularized}});
                p["classes"] = classes;
            } else if constexpr (std::is_same_v<T, LinearSvmModel>) {
                p["weights"] = to_json(m.weights);
                p["bias"] = m.bias;
                p["C"] = m.C;
                p["objective"] = m.objective;
            } else {
                p["support_vectors"] = to_json(m.support_vectors);
                p["dual_coef"] = to_json(m.dual_coef);
                p["bias"] = m.bias;
                p["C"] = m.C;
                p["gamma"] = m.gamma;
            }
        },
        model.params);
    j["params"] = p;
    return j;
}

inline ClassifierModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "nlosid-model") throw parse_error("not an nlosid model document");
        if (j.at("version").get<int>() != model_format_version)
            throw parse_error("unsupported model format version " + std::to_string(j.at("version").get<int>()));
        ClassifierModel model;
        model.feature_mode = parse_feature_mode(j.at("feature_mode").get<std::string>());
        model.carrier_freq = j.at("carrier_freq").get<double>();
        model.snr_level = j.value("snr_level", std::string{});
        model.hyperparameters = j.value("hyperparameters", std::map<std::string, double>{});
        const auto& p = j.at("params");
        const auto st = detail::standardizer_from_json(p.at("standardizer"));
        const auto kind = parse_model_kind(j.at("kind").get<std::string>());
        switch (kind) {
            case ModelKind::LR: {
                LogRegModel m;
                m.standardizer = st;
                m.weights = detail::vector_from_json(p.at("weights"));
                m.bias = p.at("bias").get<double>();
                model.params = m;
                break;
            }
            case ModelKind::LDA:
            case ModelKind::QDA: {
                DiscriminantModel m;
                m.kind = kind == ModelKind::LDA ? DiscriminantKind::Linear : DiscriminantKind::Quadratic;
                m.standardizer = st;
                const auto& cs = p.at("classes");
                if (cs.size() != 2) throw parse_error("discriminant model needs exactly 2 classes");
                for (int c = 0; c < 2; ++c) {
                    auto& g = m.classes[c];
                    g.mean = detail::vector_from_json(cs[c].at("mean"));
                    g.cov = detail::matrix_from_json(cs[c].at("cov"), g.mean.size());
                    g.prior = cs[c].at("prior").get<double>();
                    g.regularized = cs[c].value("regularized", false);
                    g.prepare();
                }
                model.params = m;
                break;
            }
            case ModelKind::LinearSVM: {
                LinearSvmModel m;
                m.standardizer = st;
                m.weights = detail::vector_from_json(p.at("weights"));
                m.bias = p.at("bias").get<double>();
                m.C = p.at("C").get<double>();
                m.objective = p.value("objective", 0.0);
                model.params = m;
                break;
            }
            case ModelKind::RbfSVM: {
                RbfSvmModel m;
                m.standardizer = st;
                m.support_vectors = detail::matrix_from_json(p.at("support_vectors"), st.dim());
                m.dual_coef = detail::vector_from_json(p.at("dual_coef"));
                m.bias = p.at("bias").get<double>();
                m.C = p.at("C").get<double>();
                m.gamma = p.at("gamma").get<double>();
                model.params = m;
                break;
            }
        }
        if (model.dim() != static_cast<Eigen::Index>(feature_dim(model.feature_mode)))
            throw parse_error("model dimension does not match its feature mode");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("malformed model document: ") + e.what());
    }
}

inline void save_model(const std::string& path, const ClassifierModel& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << to_json(model).dump(2) << '\n';
}

inline ClassifierModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return model_from_json(nlohmann::json::parse(is));
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

}  // namespace nlosid::ml
