// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "../channelsim.hpp"
#include "../common.hpp"
#include "../pathloss.hpp"

namespace nlosid::ml {

/// Pathloss1D = [pathloss_db]; Pathloss2D = [pathloss_db, regressor_db(d)].
enum class FeatureMode { Pathloss1D, Pathloss2D };

inline std::size_t feature_dim(FeatureMode m) noexcept { return m == FeatureMode::Pathloss1D ? 1 : 2; }

inline std::string_view to_string(FeatureMode m) noexcept { return m == FeatureMode::Pathloss1D ? "1d" : "2d"; }

inline FeatureMode parse_feature_mode(std::string_view s) {
    if (s == "1d") return FeatureMode::Pathloss1D;
    if (s == "2d") return FeatureMode::Pathloss2D;
    throw parse_error("unknown feature mode '" + std::string(s) + "' (expected 1d or 2d)");
}

inline Eigen::VectorXd featurize(const Measurement& m, FeatureMode mode, double wavelength) {
    Eigen::VectorXd v(feature_dim(mode));
    v(0) = m.pathloss_db;
    if (mode == FeatureMode::Pathloss2D) v(1) = regressor_db(m.distance, wavelength);
    return v;
}

struct LabelledFeatures {
    Eigen::MatrixXd X;  // one row per sample
    std::vector<Label> y;

    std::size_t size() const noexcept { return y.size(); }
};

inline LabelledFeatures build_features(const Dataset& ds, std::span<const std::size_t> indices, FeatureMode mode,
                                       double wavelength) {
    LabelledFeatures out;
    out.X.resize(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(feature_dim(mode)));
    out.y.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto& m = ds.measurements.at(indices[r]);
        out.X.row(static_cast<Eigen::Index>(r)) = featurize(m, mode, wavelength).transpose();
        out.y.push_back(m.scenario);
    }
    return out;
}

inline std::size_t count_label(std::span<const Label> y, Label l) {
    std::size_t n = 0;
    for (Label v : y) n += (v == l);
    return n;
}

inline void require_both_classes(std::span<const Label> y) {
    if (count_label(y, Label::Los) == 0 || count_label(y, Label::Nlos) == 0)
        throw invalid_argument("training data must contain both LOS and NLOS samples");
}

}  // namespace nlosid::ml
