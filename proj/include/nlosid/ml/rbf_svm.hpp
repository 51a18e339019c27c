// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Soft-margin SVM with Gaussian kernel k(a, b) = exp(-gamma |a - b|^2),
// trained in the dual
//
//     min_a  1/2 a^T Q a - e^T a,   Q_ij = y_i y_j k(x_i, x_j)
//     s.t.   0 <= a_i <= C,  y^T a = 0
//
// by SMO with second-order working-set selection. Training stops when the
// maximal KKT violation m(a) - M(a) drops below the tolerance.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "../common.hpp"
#include "features.hpp"
#include "standardizer.hpp"

namespace nlosid::ml {

struct RbfSvmConfig {
    double kkt_tol = 1e-3;
    std::size_t max_iter = 0;  // 0 -> max(10'000'000, 100 n)
    double sv_threshold = 1e-8;
    std::size_t cache_mb = 256;
    bool standardize = true;
    /// Called after every SMO update with the full dual vector (tests only).
    std::function<void(std::span<const double>)> observer;
};

struct RbfSvmModel {
    Eigen::MatrixXd support_vectors;  // standardized space, one per row
    Eigen::VectorXd dual_coef;        // alpha_i y_i
    double bias = 0.0;
    double C = 1.0;
    double gamma = 1.0;
    Standardizer standardizer;

    double kernel_sum(const Eigen::VectorXd& xs) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < support_vectors.rows(); ++i)
            acc += dual_coef(i) * std::exp(-gamma * (support_vectors.row(i).transpose() - xs).squaredNorm());
        return acc;
    }

    double score(const Eigen::VectorXd& x) const { return kernel_sum(standardizer.apply(x)) + bias; }
};

struct RbfSvmTrainInfo {
    std::vector<double> alpha;  // full dual vector at termination
    std::size_t iterations = 0;
    double max_kkt_violation = 0.0;
    double dual_objective = 0.0;  // e^T a - 1/2 a^T Q a
};

namespace detail {

/// Least-recently-used cache of kernel rows.
class KernelRowCache {
public:
    KernelRowCache(const Eigen::MatrixXd& X, double gamma, std::size_t budget_bytes)
        : X_(X), gamma_(gamma), sq_norm_(X.rowwise().squaredNorm()) {
        const std::size_t row_bytes = static_cast<std::size_t>(X.rows()) * sizeof(double) + 64;
        capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
    }

    const std::vector<double>& row(Eigen::Index i) {
        auto it = map_.find(i);
        if (it != map_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second);
            return it->second->second;
        }
        if (map_.size() >= capacity_) {
            map_.erase(lru_.back().first);
            lru_.pop_back();
        }
        std::vector<double> values(static_cast<std::size_t>(X_.rows()));
        const Eigen::VectorXd dots = X_ * X_.row(i).transpose();
        for (Eigen::Index j = 0; j < X_.rows(); ++j) {
            const double d2 = std::max(0.0, sq_norm_(i) + sq_norm_(j) - 2.0 * dots(j));
            values[static_cast<std::size_t>(j)] = std::exp(-gamma_ * d2);
        }
        values[static_cast<std::size_t>(i)] = 1.0;
        lru_.emplace_front(i, std::move(values));
        map_[i] = lru_.begin();
        return lru_.front().second;
    }

private:
    const Eigen::MatrixXd& X_;
    double gamma_;
    Eigen::VectorXd sq_norm_;
    std::size_t capacity_;
    std::list<std::pair<Eigen::Index, std::vector<double>>> lru_;
    std::unordered_map<Eigen::Index, std::list<std::pair<Eigen::Index, std::vector<double>>>::iterator> map_;
};

}  // namespace detail

inline RbfSvmModel train_rbf_svm(const Eigen::MatrixXd& X, std::span<const Label> labels, double C, double gamma,
                                 const RbfSvmConfig& cfg = {}, RbfSvmTrainInfo* info = nullptr) {
    if (!(C > 0.0) || !std::isfinite(C)) throw invalid_argument("RBF SVM requires C > 0");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw invalid_argument("RBF SVM requires gamma > 0");
    if (static_cast<std::size_t>(X.rows()) != labels.size()) throw invalid_argument("feature/label count mismatch");
    require_both_classes(labels);

    RbfSvmModel model;
    model.C = C;
    model.gamma = gamma;
    model.standardizer = cfg.standardize ? Standardizer::fit(X) : Standardizer::identity(X.cols());
    const Eigen::MatrixXd Xs = model.standardizer.apply(X);
    const auto n = static_cast<std::size_t>(Xs.rows());

    std::vector<double> y(n), alpha(n, 0.0), G(n, -1.0);
    for (std::size_t i = 0; i < n; ++i) y[i] = label_sign(labels[i]);
    detail::KernelRowCache cache(Xs, gamma, cfg.cache_mb << 20);
    constexpr double tau = 1e-12;

    auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
    auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };

    const std::size_t max_iter = cfg.max_iter ? cfg.max_iter : std::max<std::size_t>(10'000'000, 100 * n);
    std::size_t iter = 0;
    double violation = std::numeric_limits<double>::infinity();

    while (true) {
        // i: maximal violating index in I_up.
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t) && -y[t] * G[t] > gmax) {
                gmax = -y[t] * G[t];
                i = t;
            }
            if (in_low(t)) gmin = std::min(gmin, -y[t] * G[t]);
        }
        violation = (i == n || !std::isfinite(gmin)) ? 0.0 : gmax - gmin;
        if (violation < cfg.kkt_tol) break;
        if (iter >= max_iter)
            throw non_convergence("SMO did not converge within " + std::to_string(max_iter) +
                                      " iterations; max KKT violation " + format_double(violation),
                                  violation);

        // j: second-order selection in I_low.
        const auto& Ki = cache.row(static_cast<Eigen::Index>(i));
        std::size_t j = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            const double b_it = gmax + y[t] * G[t];
            if (b_it <= 0.0) continue;
            double a_it = 2.0 - 2.0 * Ki[t];  // K_ii = K_tt = 1
            if (a_it <= 0.0) a_it = tau;
            const double obj = -(b_it * b_it) / a_it;
            if (obj <= best) {
                best = obj;
                j = t;
            }
        }
        if (j == n) break;
        // Ki stays valid: list nodes are stable and the cache holds >= 2 rows.
        const auto& Kj = cache.row(static_cast<Eigen::Index>(j));

        const double old_ai = alpha[i], old_aj = alpha[j];
        double quad = 2.0 - 2.0 * Ki[j];
        if (quad <= 0.0) quad = tau;
        if (y[i] != y[j]) {
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else {
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = -diff;
                }
            }
            if (diff > 0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = C + diff;
                }
            }
        } else {
            const double delta = (G[i] - G[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = sum;
                }
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else {
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = sum;
                }
            }
        }

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t) G[t] += y[t] * (y[i] * Ki[t] * dai + y[j] * Kj[t] * daj);
        ++iter;
        if (cfg.observer) cfg.observer(alpha);
    }

    // rho from free vectors, else midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yG = y[t] * G[t];
        if (alpha[t] >= C) {
            if (y[t] < 0) ub = std::min(ub, yG);
            else lb = std::max(lb, yG);
        } else if (alpha[t] <= 0) {
            if (y[t] > 0) ub = std::min(ub, yG);
            else lb = std::max(lb, yG);
        } else {
            ++n_free;
            sum_free += yG;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    model.bias = -rho;

    std::vector<std::size_t> sv;
    for (std::size_t t = 0; t < n; ++t)
        if (alpha[t] > cfg.sv_threshold) sv.push_back(t);
    model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), Xs.cols());
    model.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) {
        model.support_vectors.row(static_cast<Eigen::Index>(k)) = Xs.row(static_cast<Eigen::Index>(sv[k]));
        model.dual_coef(static_cast<Eigen::Index>(k)) = alpha[sv[k]] * y[sv[k]];
    }

    if (info) {
        // G = Q a - e, so a^T Q a = a^T (G + e).
        double lin = 0.0, quad_term = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            lin += alpha[t];
            quad_term += alpha[t] * (G[t] + 1.0);
        }
        info->alpha = alpha;
        info->iterations = iter;
        info->max_kkt_violation = violation;
        info->dual_objective = lin - 0.5 * quad_term;
    }
    return model;
}

}  // namespace nlosid::ml
