// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Training with hyperparameters picked on the validation split.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "../common.hpp"
#include "../metrics.hpp"
#include "features.hpp"
#include "model.hpp"
#include "split.hpp"

namespace nlosid::ml {

struct TrainingConfig {
    FeatureMode feature_mode = FeatureMode::Pathloss2D;
    std::vector<double> c_grid{0.1, 1.0, 10.0};
    std::vector<double> gamma_grid{0.1, 1.0, 10.0};  // scaled by 1 / feature dim
    std::size_t rbf_cap_per_class = 5000;
    LogRegConfig logreg;
    LinearSvmConfig linear_svm;
    RbfSvmConfig rbf_svm;
    std::uint64_t seed = 0;
};

struct SelectionEntry {
    std::map<std::string, double> hyperparameters;
    double validation_accuracy = 0.0;  // standard accuracy, percent
};

struct TrainedModel {
    ClassifierModel model;
    std::vector<SelectionEntry> selection_log;
    std::size_t training_samples = 0;
};

inline double standard_accuracy(const ClassifierModel& m, const LabelledFeatures& data) {
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < data.X.rows(); ++i)
        correct += m.predict(data.X.row(i).transpose()) == data.y[static_cast<std::size_t>(i)];
    return 100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace detail {

inline LabelledFeatures take_rows(const LabelledFeatures& src, std::span<const std::size_t> rows) {
    LabelledFeatures out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), src.X.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.X.row(static_cast<Eigen::Index>(k)) = src.X.row(static_cast<Eigen::Index>(rows[k]));
        out.y.push_back(src.y[rows[k]]);
    }
    return out;
}

}  // namespace detail

/// Trains one model kind. Grid candidates are compared by validation accuracy;
/// ties keep the earlier grid point. An empty validation set skips selection
/// and uses the first grid point.
inline TrainedModel train_model(ModelKind kind, const LabelledFeatures& train, const LabelledFeatures& validation,
                                const TrainingConfig& cfg) {
    TrainedModel out;
    out.model.feature_mode = cfg.feature_mode;
    out.training_samples = train.size();

    auto consider = [&](ClassifierModel candidate, std::map<std::string, double> hp) {
        candidate.feature_mode = cfg.feature_mode;
        candidate.hyperparameters = hp;
        SelectionEntry e{hp, validation.size() ? standard_accuracy(candidate, validation) : 0.0};
        const bool better = out.selection_log.empty() ||
                            e.validation_accuracy > std::max_element(out.selection_log.begin(), out.selection_log.end(),
                                                                     [](const auto& a, const auto& b) {
                                                                         return a.validation_accuracy <
                                                                                b.validation_accuracy;
                                                                     })->validation_accuracy;
        out.selection_log.push_back(e);
        if (better) out.model = std::move(candidate);
    };

    switch (kind) {
        case ModelKind::LR: {
            ClassifierModel m;
            m.params = train_logreg(train.X, train.y, cfg.logreg);
            consider(std::move(m), {{"step", cfg.logreg.step}});
            break;
        }
        case ModelKind::LDA:
        case ModelKind::QDA: {
            ClassifierModel m;
            m.params = train_discriminant(train.X, train.y,
                                          kind == ModelKind::LDA ? DiscriminantKind::Linear : DiscriminantKind::Quadratic);
            consider(std::move(m), {});
            break;
        }
        case ModelKind::LinearSVM: {
            for (double C : cfg.c_grid) {
                ClassifierModel m;
                m.params = train_linear_svm(train.X, train.y, C, cfg.linear_svm);
                consider(std::move(m), {{"C", C}});
                if (!validation.size()) break;
            }
            break;
        }
        case ModelKind::RbfSVM: {
            std::vector<std::size_t> all(train.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            const auto rows = subsample_per_class(all, train.y, cfg.rbf_cap_per_class, cfg.seed);
            const auto sub = detail::take_rows(train, rows);
            out.training_samples = sub.size();
            const double inv_dim = 1.0 / static_cast<double>(train.X.cols());
            bool done = false;
            for (double C : cfg.c_grid) {
                for (double g : cfg.gamma_grid) {
                    ClassifierModel m;
                    m.params = train_rbf_svm(sub.X, sub.y, C, g * inv_dim, cfg.rbf_svm);
                    consider(std::move(m), {{"C", C}, {"gamma", g * inv_dim}});
                    if (!validation.size()) {
                        done = true;
                        break;
                    }
                }
                if (done) break;
            }
            break;
        }
    }
    return out;
}

}  // namespace nlosid::ml
