// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Gaussian discriminant classifiers.
//
// LDA: shared (pooled) covariance -> linear boundary.
// QDA: one covariance per class   -> quadratic boundary.
//
// Class k's discriminant is  -1/2 log|S_k| - 1/2 (x - mu_k)^T S_k^-1 (x - mu_k) + log pi_k
// and the score is discriminant(NLOS) - discriminant(LOS), i.e. log posterior odds.

#pragma once

#include <array>
#include <cmath>
#include <span>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "../common.hpp"
#include "features.hpp"
#include "standardizer.hpp"

namespace nlosid::ml {

struct GaussianClass {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    double prior = 0.5;
    bool regularized = false;

    // Derived from cov by prepare().
    Eigen::LLT<Eigen::MatrixXd> chol;
    double log_det = 0.0;

    void prepare() {
        chol.compute(cov);
        if (chol.info() != Eigen::Success) throw singular_covariance("covariance is not positive definite");
        const Eigen::MatrixXd L = chol.matrixL();
        log_det = 2.0 * L.diagonal().array().log().sum();
    }

    double discriminant(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd z = chol.matrixL().solve(x - mean);
        return -0.5 * log_det - 0.5 * z.squaredNorm() + std::log(prior);
    }
};

enum class DiscriminantKind { Linear, Quadratic };

struct DiscriminantModel {
    DiscriminantKind kind = DiscriminantKind::Linear;
    std::array<GaussianClass, 2> classes;  // indexed by Label
    Standardizer standardizer;

    double score(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd xs = standardizer.apply(x);
        return classes[1].discriminant(xs) - classes[0].discriminant(xs);
    }
};

struct DiscriminantConfig {
    bool standardize = true;
};

namespace detail {

/// Cholesky with automatic ridge eps*I, eps = 1e-6 * trace / dim, when the
/// covariance is singular or numerically so.
inline void prepare_with_ridge(GaussianClass& g) {
    const auto dim = g.cov.rows();
    Eigen::LLT<Eigen::MatrixXd> probe(g.cov);
    bool ok = probe.info() == Eigen::Success;
    if (ok) {
        // pivot^2 relative to the largest variance: a reciprocal-condition proxy
        const Eigen::MatrixXd L = probe.matrixL();
        const double pivot = L.diagonal().minCoeff();
        ok = pivot * pivot > 1e-12 * g.cov.diagonal().maxCoeff();
    }
    if (!ok) {
        const double eps = 1e-6 * g.cov.trace() / static_cast<double>(dim);
        if (!(eps > 0.0))
            throw singular_covariance("covariance is singular and has zero trace; features carry no variance");
        g.cov += eps * Eigen::MatrixXd::Identity(dim, dim);
        g.regularized = true;
    }
    try {
        g.prepare();
    } catch (const singular_covariance&) {
        throw singular_covariance("covariance is singular even after ridge regularization");
    }
}

}  // namespace detail

inline DiscriminantModel train_discriminant(const Eigen::MatrixXd& X, std::span<const Label> y,
                                            DiscriminantKind kind, const DiscriminantConfig& cfg = {}) {
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw invalid_argument("feature/label count mismatch");
    require_both_classes(y);
    const auto dim = X.cols();

    DiscriminantModel model;
    model.kind = kind;
    model.standardizer = cfg.standardize ? Standardizer::fit(X) : Standardizer::identity(dim);
    const Eigen::MatrixXd Xs = model.standardizer.apply(X);

    std::array<std::size_t, 2> count{};
    std::array<Eigen::VectorXd, 2> sum{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
    for (Eigen::Index i = 0; i < Xs.rows(); ++i) {
        const int c = static_cast<int>(y[static_cast<std::size_t>(i)]);
        ++count[c];
        sum[c] += Xs.row(i).transpose();
    }
    for (int c = 0; c < 2; ++c)
        if (count[c] <= static_cast<std::size_t>(dim))
            throw invalid_argument("each class needs more samples than feature dimensions");

    std::array<Eigen::MatrixXd, 2> scatter{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
    for (int c = 0; c < 2; ++c) model.classes[c].mean = sum[c] / static_cast<double>(count[c]);
    for (Eigen::Index i = 0; i < Xs.rows(); ++i) {
        const int c = static_cast<int>(y[static_cast<std::size_t>(i)]);
        const Eigen::VectorXd d = Xs.row(i).transpose() - model.classes[c].mean;
        scatter[c].noalias() += d * d.transpose();
    }
    const double n = static_cast<double>(Xs.rows());
    for (int c = 0; c < 2; ++c) model.classes[c].prior = static_cast<double>(count[c]) / n;

    if (kind == DiscriminantKind::Linear) {
        const Eigen::MatrixXd pooled = (scatter[0] + scatter[1]) / (n - 2.0);
        GaussianClass shared;
        shared.cov = pooled;
        detail::prepare_with_ridge(shared);
        for (int c = 0; c < 2; ++c) {
            model.classes[c].cov = shared.cov;
            model.classes[c].regularized = shared.regularized;
            model.classes[c].prepare();
        }
    } else {
        for (int c = 0; c < 2; ++c) {
            model.classes[c].cov = scatter[c] / (static_cast<double>(count[c]) - 1.0);
            detail::prepare_with_ridge(model.classes[c]);
        }
    }
    return model;
}

inline DiscriminantModel train_lda(const Eigen::MatrixXd& X, std::span<const Label> y,
                                   const DiscriminantConfig& cfg = {}) {
    return train_discriminant(X, y, DiscriminantKind::Linear, cfg);
}

inline DiscriminantModel train_qda(const Eigen::MatrixXd& X, std::span<const Label> y,
                                   const DiscriminantConfig& cfg = {}) {
    return train_discriminant(X, y, DiscriminantKind::Quadratic, cfg);
}

}  // namespace nlosid::ml
