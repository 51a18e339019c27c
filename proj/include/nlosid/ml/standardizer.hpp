// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "../common.hpp"

namespace nlosid::ml {

/// Per-feature affine map x -> (x - mean) / std, learned on training data.
/// std is the population standard deviation.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;

    static Standardizer identity(Eigen::Index dim) {
        return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
    }

    static Standardizer fit(const Eigen::MatrixXd& X) {
        if (X.rows() < 1) throw invalid_argument("cannot standardize an empty feature matrix");
        Standardizer s;
        s.mean = X.colwise().mean().transpose();
        s.std.resize(X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double var = (X.col(j).array() - s.mean(j)).square().mean();
            s.std(j) = std::sqrt(var);
            if (!(s.std(j) > 0.0) || !std::isfinite(s.std(j)))
                throw invalid_argument("feature " + std::to_string(j) + " has zero variance and is rejected");
        }
        return s;
    }

    Eigen::Index dim() const noexcept { return mean.size(); }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
        if (X.cols() != dim()) throw invalid_argument("feature dimension mismatch");
        return (X.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        if (x.size() != dim()) throw invalid_argument("feature dimension mismatch");
        return ((x - mean).array() / std.array()).matrix();
    }
};

}  // namespace nlosid::ml
