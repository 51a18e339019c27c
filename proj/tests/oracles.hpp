// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Reference computations for the tests. None of these call into the library
// code they are used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline long double normal_pdf(long double x) {
    return std::exp(-0.5L * x * x) / std::sqrt(2.0L * std::numbers::pi_v<long double>);
}

namespace detail {

inline long double simpson(long double fa, long double fm, long double fb, long double h) {
    return h / 6.0L * (fa + 4.0L * fm + fb);
}

inline long double adaptive(const std::function<long double(long double)>& f, long double a, long double b,
                            long double fa, long double fm, long double fb, long double whole, long double eps,
                            int depth) {
    const long double m = 0.5L * (a + b);
    const long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
    const long double flm = f(lm), frm = f(rm);
    const long double left = simpson(fa, flm, fm, m - a);
    const long double right = simpson(fm, frm, fb, b - m);
    const long double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0L * eps) return left + right + delta / 15.0L;
    return adaptive(f, a, m, fa, flm, fm, left, eps / 2.0L, depth - 1) +
           adaptive(f, m, b, fm, frm, fb, right, eps / 2.0L, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b].
inline long double integrate(const std::function<long double(long double)>& f, long double a, long double b,
                             long double eps = 1e-15L, int max_depth = 50) {
    if (a == b) return 0.0L;
    const long double fa = f(a), fb = f(b), fm = f(0.5L * (a + b));
    return detail::adaptive(f, a, b, fa, fm, fb, detail::simpson(fa, fm, fb, b - a), eps, max_depth);
}

/// Upper-tail standard normal probability by integrating the density.
inline double q_integral(double x) {
    const long double lx = x;
    if (x >= 0) return static_cast<double>(0.5L - integrate(normal_pdf, 0.0L, lx));
    return static_cast<double>(0.5L + integrate(normal_pdf, lx, 0.0L));
}

/// Solves q_integral(x) = p by bisection.
inline double q_inverse(double p) {
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (q_integral(mid) > p) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double phi_cdf(double x) { return 1.0 - q_integral(x); }

// ----- Least squares ---------------------------------------------------------

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Centered closed form in long double.
inline Line ls_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const long double b = sxy / sxx;
    return {static_cast<double>(b), static_cast<double>(my - b * mx)};
}

/// Standard error of the slope for known noise sigma.
inline double slope_se(const std::vector<double>& x, double sigma) {
    long double mx = 0;
    for (double v : x) mx += v;
    mx /= x.size();
    long double sxx = 0;
    for (double v : x) sxx += (v - mx) * (v - mx);
    return static_cast<double>(sigma / std::sqrt(sxx));
}

// ----- Ranking ---------------------------------------------------------------

/// P(score_pos > score_neg) + 0.5 P(tie), by counting all pairs.
inline double mann_whitney_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
    long double wins = 0;
    for (double p : pos)
        for (double q : neg) wins += p > q ? 1.0L : (p == q ? 0.5L : 0.0L);
    return static_cast<double>(wins / (static_cast<long double>(pos.size()) * neg.size()));
}

/// Binormal AUC for equal-variance Gaussians separated by d standard deviations.
inline double binormal_auc(double d) { return phi_cdf(d / std::numbers::sqrt2); }

// ----- SVM dual --------------------------------------------------------------

struct DualProblem {
    std::vector<std::vector<double>> Q;  // y_i y_j k(x_i, x_j)
    std::vector<double> y;
    double C = 1.0;
};

inline double dual_value(const DualProblem& p, const std::vector<double>& a) {
    // e^T a - 1/2 a^T Q a (to be maximized)
    long double lin = 0, quad = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        lin += a[i];
        for (std::size_t j = 0; j < a.size(); ++j) quad += a[i] * p.Q[i][j] * a[j];
    }
    return static_cast<double>(lin - 0.5L * quad);
}

/// Euclidean projection onto {0 <= a <= C, y^T a = 0}: a_i = clip(v_i - nu y_i),
/// with nu found by bisection on the monotone constraint residual.
inline std::vector<double> project(const std::vector<double>& v, const std::vector<double>& y, double C) {
    auto clip = [&](double t) { return std::clamp(t, 0.0, C); };
    auto residual = [&](double nu) {
        long double r = 0;
        for (std::size_t i = 0; i < v.size(); ++i) r += y[i] * clip(v[i] - nu * y[i]);
        return r;
    };
    double lo = -1.0, hi = 1.0;
    while (residual(lo) < 0) lo *= 2.0;
    while (residual(hi) > 0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0) lo = mid;
        else hi = mid;
    }
    const double nu = 0.5 * (lo + hi);
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = clip(v[i] - nu * y[i]);
    return a;
}

struct DualSolution {
    std::vector<double> alpha;
    double objective = 0.0;  // dual value, maximized
    double stationarity = 0.0;
    std::size_t iterations = 0;
};

/// Accelerated projected gradient on min 1/2 a^T Q a - e^T a with restarts;
/// stops when the projected-gradient step norm falls below tol.
inline DualSolution projected_gradient_dual(const DualProblem& p, double tol = 1e-8,
                                            std::size_t max_iter = 2'000'000) {
    const std::size_t n = p.y.size();
    // Lipschitz constant: Gershgorin bound on the largest eigenvalue.
    double L = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(p.Q[i][j]);
        L = std::max(L, row);
    }
    L = std::max(L, 1e-12);
    auto grad = [&](const std::vector<double>& a) {
        std::vector<double> g(n, -1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) g[i] += p.Q[i][j] * a[j];
        return g;
    };
    auto step = [&](const std::vector<double>& z) {
        const auto g = grad(z);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = z[i] - g[i] / L;
        return project(v, p.y, p.C);
    };
    auto primal = [&](const std::vector<double>& a) { return -dual_value(p, a); };

    std::vector<double> a = project(std::vector<double>(n, 0.0), p.y, p.C);
    std::vector<double> z = a;
    double t = 1.0;
    DualSolution out;
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<double> next = step(z);
        if (primal(next) > primal(a)) {  // restart momentum
            z = a;
            t = 1.0;
            next = step(z);
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < n; ++i) z[i] = next[i] + (t - 1.0) / t_next * (next[i] - a[i]);
        a = std::move(next);
        t = t_next;
        out.iterations = it + 1;
        // Stationarity: distance moved by a plain projected-gradient step from a.
        const auto s = step(a);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) d2 += (s[i] - a[i]) * (s[i] - a[i]);
        out.stationarity = std::sqrt(d2) * L;
        if (out.stationarity < tol) break;
    }
    out.alpha = a;
    out.objective = dual_value(p, a);
    return out;
}

// ----- Gaussian classification -----------------------------------------------

/// Bayes accuracy, equal priors, for N(0, I) vs N((m, 0), diag(1, s^2)) in 2D.
/// The optimal region is x1 > t(x2); each class term is a 1D integral of a
/// Q-function over x2.
inline double bayes_accuracy_2d(double m, double s) {
    const double c = 0.5 * (1.0 - 1.0 / (s * s));
    auto t = [&](long double x2) { return static_cast<double>((0.5L * m * m - c * x2 * x2 + std::log(s)) / m); };
    auto los = [&](long double x2) { return normal_pdf(x2) * (1.0L - q_integral(t(x2))); };
    auto nlos = [&](long double x2) { return normal_pdf(x2 / s) / s * q_integral(t(x2) - m); };
    const long double span = 12.0L * std::max(1.0, s);
    const long double p0 = integrate(los, -span, span, 1e-12L, 30);
    const long double p1 = integrate(nlos, -span, span, 1e-12L, 30);
    return static_cast<double>(0.5L * (p0 + p1));
}

// ----- Linear SVM ------------------------------------------------------------

/// min over (w, b) of 1/2 w^2 + C sum hinge for 1D data by zooming grid search.
inline double linear_svm_grid_1d(const std::vector<double>& x, const std::vector<double>& y, double C,
                                 double* w_out = nullptr, double* b_out = nullptr) {
    auto obj = [&](double w, double b) {
        long double h = 0;
        for (std::size_t i = 0; i < x.size(); ++i) h += std::max(0.0, 1.0 - y[i] * (w * x[i] + b));
        return static_cast<double>(0.5L * w * w + C * h);
    };
    double cw = 0.0, cb = 0.0, half = 50.0;
    double best = obj(cw, cb);
    for (int level = 0; level < 60; ++level) {
        const int g = 200;
        double bw = cw, bb = cb;
        for (int i = -g; i <= g; ++i)
            for (int j = -g; j <= g; ++j) {
                const double w = cw + half * i / g, b = cb + half * j / g;
                const double v = obj(w, b);
                if (v < best) {
                    best = v;
                    bw = w;
                    bb = b;
                }
            }
        cw = bw;
        cb = bb;
        half *= 0.1;
        if (half < 1e-12) break;
    }
    if (w_out) *w_out = cw;
    if (b_out) *b_out = cb;
    return best;
}

}  // namespace oracle
