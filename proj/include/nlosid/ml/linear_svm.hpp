// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Soft-margin linear SVM in the primal:
//
//     min  1/2 |w|^2 + C sum_i max(0, 1 - y_i (w.x_i + b))
//
// solved by full-batch subgradient descent (step eta0 / sqrt(t)) with suffix
// averaging. The returned point is the best of {last, best, averaged} after
// two finishing steps: exact minimization over b for fixed w, and an
// active-set solve of the KKT system on the margin points it identifies.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "../common.hpp"
#include "features.hpp"
#include "standardizer.hpp"

namespace nlosid::ml {

struct LinearSvmConfig {
    std::size_t iterations = 3000;
    double step0 = 1.0;
    bool standardize = true;
    bool polish = true;
};

struct LinearSvmModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    double C = 1.0;
    double objective = 0.0;  // primal objective in standardized space
    Standardizer standardizer;

    double score(const Eigen::VectorXd& x) const { return weights.dot(standardizer.apply(x)) + bias; }
};

inline double linear_svm_objective(const Eigen::MatrixXd& Xs, std::span<const Label> y, const Eigen::VectorXd& w,
                                   double b, double C) {
    const Eigen::VectorXd s = Xs * w;
    double hinge = 0.0;
    for (Eigen::Index i = 0; i < Xs.rows(); ++i)
        hinge += std::max(0.0, 1.0 - label_sign(y[static_cast<std::size_t>(i)]) * (s(i) + b));
    return 0.5 * w.squaredNorm() + C * hinge;
}

namespace detail {

/// argmin_b sum_i max(0, 1 - y_i (s_i + b)); midpoint of the optimal interval.
inline double optimal_bias(const Eigen::VectorXd& s, std::span<const Label> y) {
    std::vector<double> bp(static_cast<std::size_t>(s.size()));
    std::size_t n_pos = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double yi = label_sign(y[static_cast<std::size_t>(i)]);
        bp[static_cast<std::size_t>(i)] = yi - s(i);
        n_pos += yi > 0;
    }
    // Slope after passing k sorted breakpoints is k - n_pos.
    std::sort(bp.begin(), bp.end());
    if (n_pos == 0) return bp.front();
    if (n_pos == bp.size()) return bp.back();
    return 0.5 * (bp[n_pos - 1] + bp[n_pos]);
}

/// Solves the KKT system for the margin set M identified at (w, b) with
/// tolerance tol. Returns false when the identified active set is inconsistent.
inline bool active_set_solve(const Eigen::MatrixXd& Xs, std::span<const Label> y, double C, double tol,
                             Eigen::VectorXd& w, double& b) {
    const Eigen::Index n = Xs.rows(), d = Xs.cols();
    const Eigen::VectorXd f = Xs * w;
    std::vector<Eigen::Index> margin;
    Eigen::VectorXd w_v = Eigen::VectorXd::Zero(d);
    double sum_v = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double yi = label_sign(y[static_cast<std::size_t>(i)]);
        const double m = yi * (f(i) + b);
        if (std::abs(m - 1.0) <= tol)
            margin.push_back(i);
        else if (m < 1.0) {
            w_v += C * yi * Xs.row(i).transpose();
            sum_v += C * yi;
        }
    }
    const auto k = static_cast<Eigen::Index>(margin.size());
    if (k == 0 || k > 400) return false;

    // Unknowns [beta (k), b]; rows: margin equalities then sum beta y = -sum_v.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index i = margin[static_cast<std::size_t>(r)];
        const double yi = label_sign(y[static_cast<std::size_t>(i)]);
        for (Eigen::Index c = 0; c < k; ++c) {
            const Eigen::Index j = margin[static_cast<std::size_t>(c)];
            A(r, c) = yi * label_sign(y[static_cast<std::size_t>(j)]) * Xs.row(i).dot(Xs.row(j));
        }
        A(r, k) = yi;
        rhs(r) = 1.0 - yi * Xs.row(i).dot(w_v);
    }
    for (Eigen::Index c = 0; c < k; ++c)
        A(k, c) = label_sign(y[static_cast<std::size_t>(margin[static_cast<std::size_t>(c)])]);
    rhs(k) = -sum_v;

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    const Eigen::VectorXd sol = cod.solve(rhs);
    if (!sol.allFinite() || (A * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) return false;
    const double box_tol = 1e-9 * std::max(1.0, C);
    for (Eigen::Index c = 0; c < k; ++c)
        if (sol(c) < -box_tol || sol(c) > C + box_tol) return false;

    Eigen::VectorXd w_new = w_v;
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::Index j = margin[static_cast<std::size_t>(c)];
        w_new += sol(c) * label_sign(y[static_cast<std::size_t>(j)]) * Xs.row(j).transpose();
    }
    w = w_new;
    b = sol(k);
    return true;
}

}  // namespace detail

inline LinearSvmModel train_linear_svm(const Eigen::MatrixXd& X, std::span<const Label> y, double C,
                                       const LinearSvmConfig& cfg = {}) {
    if (!(C > 0.0) || !std::isfinite(C)) throw invalid_argument("linear SVM requires C > 0");
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw invalid_argument("feature/label count mismatch");
    require_both_classes(y);

    LinearSvmModel model;
    model.C = C;
    model.standardizer = cfg.standardize ? Standardizer::fit(X) : Standardizer::identity(X.cols());
    const Eigen::MatrixXd Xs = model.standardizer.apply(X);
    const Eigen::Index n = Xs.rows(), d = Xs.cols();
    const double nd = static_cast<double>(n);

    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) yv(i) = label_sign(y[static_cast<std::size_t>(i)]);

    // Iterate on the objective scaled by 1 / (C n) so the step is scale-free.
    const double lambda = 1.0 / (C * nd);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    double b = 0.0;
    Eigen::VectorXd best_w = w, avg_w = Eigen::VectorXd::Zero(d);
    double best_b = b, avg_b = 0.0, best_obj = std::numeric_limits<double>::infinity();
    std::size_t avg_count = 0;
    const std::size_t avg_start = cfg.iterations / 2;
    Eigen::VectorXd coef(n);

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        const Eigen::VectorXd s = Xs * w;
        double hinge = 0.0, gb = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double m = yv(i) * (s(i) + b);
            if (m < 1.0) {
                hinge += 1.0 - m;
                coef(i) = -yv(i);
                gb -= yv(i);
            } else {
                coef(i) = 0.0;
            }
        }
        const double obj = 0.5 * w.squaredNorm() + C * hinge;
        if (obj < best_obj) {
            best_obj = obj;
            best_w = w;
            best_b = b;
        }
        const Eigen::VectorXd gw = lambda * w + Xs.transpose() * coef / nd;
        gb /= nd;
        const double eta = cfg.step0 / std::sqrt(static_cast<double>(t));
        w -= eta * gw;
        b -= eta * gb;
        if (t > avg_start) {
            ++avg_count;
            avg_w += (w - avg_w) / static_cast<double>(avg_count);
            avg_b += (b - avg_b) / static_cast<double>(avg_count);
        }
    }

    struct Candidate {
        Eigen::VectorXd w;
        double b;
    };
    std::vector<Candidate> candidates{{w, b}, {best_w, best_b}};
    if (avg_count > 0) candidates.push_back({avg_w, avg_b});
    auto objective = [&](const Candidate& c) { return linear_svm_objective(Xs, y, c.w, c.b, C); };
    auto best_of = [&](const std::vector<Candidate>& cs) {
        std::size_t k = 0;
        for (std::size_t i = 1; i < cs.size(); ++i)
            if (objective(cs[i]) < objective(cs[k])) k = i;
        return cs[k];
    };

    Candidate best = best_of(candidates);
    if (cfg.polish) {
        // Exact bias, then repeated solves on the guessed margin set. Each round
        // starts from the best point so far; stops when nothing improves.
        for (auto& cand : candidates) cand.b = detail::optimal_bias(Xs * cand.w, y);
        best = best_of({best, best_of(candidates)});
        for (int round = 0; round < 20; ++round) {
            std::vector<Candidate> next{best};
            for (double tol : {5e-1, 2e-1, 1e-1, 3e-2, 1e-2, 1e-3, 1e-6}) {
                Candidate exact = best;
                if (detail::active_set_solve(Xs, y, C, tol, exact.w, exact.b)) next.push_back(exact);
            }
            const Candidate improved = best_of(next);
            if (!(objective(improved) < objective(best))) break;
            best = improved;
        }
    }
    model.weights = best.w;
    model.bias = best.b;
    model.objective = objective(best);
    return model;
}

}  // namespace nlosid::ml
