// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "../common.hpp"
#include "features.hpp"
#include "standardizer.hpp"

namespace nlosid::ml {

struct LogRegConfig {
    double step = 1.0;
    std::size_t max_iter = 5000;
    double grad_tol = 1e-6;
    bool standardize = true;
};

struct LogRegModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    Standardizer standardizer;

    /// Logit; 0 <-> probability 0.5.
    double score(const Eigen::VectorXd& x) const { return weights.dot(standardizer.apply(x)) + bias; }
};

struct LogRegTrace {
    std::vector<double> loss;  // accepted iterates only
    double final_grad_norm = 0.0;
    std::size_t iterations = 0;
};

/// log(1 + exp(-m)) without overflow.
inline double softplus_neg(double m) { return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

/// sigma(-m) = 1 / (1 + exp(m))
inline double sigmoid_neg(double m) {
    if (m >= 0) {
        const double e = std::exp(-m);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(m));
}

struct LossGrad {
    double loss = 0.0;
    Eigen::VectorXd grad_w;
    double grad_b = 0.0;
};

/// Mean negative log-likelihood and its gradient with labels mapped to +-1.
inline LossGrad logreg_loss_grad(const Eigen::MatrixXd& Xs, std::span<const Label> y, const Eigen::VectorXd& w,
                                 double b) {
    const Eigen::VectorXd s = Xs * w;
    LossGrad out;
    out.grad_w = Eigen::VectorXd::Zero(w.size());
    Eigen::VectorXd coef(Xs.rows());
    const double n = static_cast<double>(Xs.rows());
    for (Eigen::Index i = 0; i < Xs.rows(); ++i) {
        const double yi = label_sign(y[static_cast<std::size_t>(i)]);
        const double m = yi * (s(i) + b);
        out.loss += softplus_neg(m);
        coef(i) = -yi * sigmoid_neg(m);
        out.grad_b += coef(i);
    }
    out.grad_w = Xs.transpose() * coef / n;
    out.loss /= n;
    out.grad_b /= n;
    return out;
}

/// Gradient descent with a fixed step; a step that raises the loss is
/// rejected and the step halved.
inline LogRegModel train_logreg(const Eigen::MatrixXd& X, std::span<const Label> y, const LogRegConfig& cfg = {},
                                LogRegTrace* trace = nullptr) {
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw invalid_argument("feature/label count mismatch");
    require_both_classes(y);
    if (!(cfg.step > 0.0)) throw invalid_argument("logreg step must be > 0");

    LogRegModel model;
    model.standardizer = cfg.standardize ? Standardizer::fit(X) : Standardizer::identity(X.cols());
    const Eigen::MatrixXd Xs = model.standardizer.apply(X);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
    double b = 0.0;
    double step = cfg.step;

    auto cur = logreg_loss_grad(Xs, y, w, b);
    if (trace) trace->loss.push_back(cur.loss);
    auto grad_norm = [](const LossGrad& g) { return std::sqrt(g.grad_w.squaredNorm() + g.grad_b * g.grad_b); };
    std::size_t it = 0;
    for (; it < cfg.max_iter && grad_norm(cur) >= cfg.grad_tol; ++it) {
        const Eigen::VectorXd w_new = w - step * cur.grad_w;
        const double b_new = b - step * cur.grad_b;
        auto next = logreg_loss_grad(Xs, y, w_new, b_new);
        if (!std::isfinite(next.loss)) throw divergence_error("logistic regression loss diverged (step too large)");
        if (next.loss > cur.loss) {
            step *= 0.5;
            if (step < 1e-12) break;
            continue;
        }
        w = w_new;
        b = b_new;
        cur = std::move(next);
        if (trace) trace->loss.push_back(cur.loss);
    }
    if (trace) {
        trace->final_grad_norm = grad_norm(cur);
        trace->iterations = it;
    }
    model.weights = w;
    model.bias = b;
    return model;
}

}  // namespace nlosid::ml
