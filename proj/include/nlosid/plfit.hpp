// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Least-squares estimation of (A, alpha) from labelled pathloss data.
//
// The fit minimizes || X theta - y ||^2 with X = [x, 1]. It is solved with a
// thin Householder QR of X; the normal equations are never formed.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "channelsim.hpp"
#include "common.hpp"
#include "dataset_io.hpp"
#include "pathloss.hpp"

namespace nlosid {

struct DesignSystem {
    std::vector<double> regressors;     // x, dB
    std::vector<double> observations;   // y, dB
    std::vector<std::size_t> source;    // index into Dataset::measurements

    std::size_t size() const noexcept { return observations.size(); }
};

struct MeasurementFilter {
    std::optional<Label> scenario;
    std::optional<std::string> snr_level;

    bool accepts(const Measurement& m) const {
        return (!scenario || m.scenario == *scenario) && (!snr_level || m.snr_level == *snr_level);
    }
};

inline DesignSystem build_design(const Dataset& ds, const MeasurementFilter& filter, double wavelength) {
    DesignSystem sys;
    std::set<double> distinct;
    for (std::size_t i = 0; i < ds.measurements.size(); ++i) {
        const auto& m = ds.measurements[i];
        if (!filter.accepts(m)) continue;
        sys.regressors.push_back(regressor_db(m.distance, wavelength));
        sys.observations.push_back(m.pathloss_db);
        sys.source.push_back(i);
        distinct.insert(m.distance);
    }
    if (sys.size() == 0) throw invalid_argument("no measurements match the filter");
    if (distinct.size() < 2)
        throw rank_deficient("rank-deficient design: all measurements share a single distance");
    return sys;
}

namespace detail {

inline double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

/// Applies I - 2 v v^T / (v^T v) to w in place, both restricted to [offset, n).
inline void reflect(std::span<const double> v, double vv, std::span<double> w) {
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * w[i];
    const double f = 2.0 * dot / vv;
    for (std::size_t i = 0; i < v.size(); ++i) w[i] -= f * v[i];
}

}  // namespace detail

/// Least-squares fit of y = A + alpha x.
inline PathlossParams ls_fit(const DesignSystem& sys) {
    const std::size_t n = sys.size();
    if (sys.regressors.size() != n) throw invalid_argument("regressor/observation length mismatch");
    if (n < 2) throw rank_deficient("need at least 2 observations");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(sys.observations[i]) || !std::isfinite(sys.regressors[i]))
            throw invalid_argument("non-finite value in design system at row " + std::to_string(i));
    const auto [xmin, xmax] = std::minmax_element(sys.regressors.begin(), sys.regressors.end());
    if (*xmin == *xmax) throw rank_deficient("rank-deficient design: regressors are all identical");

    std::vector<double> col_x = sys.regressors;
    std::vector<double> col_1(n, 1.0);
    std::vector<double> qty = sys.observations;

    // First reflection zeroes col_x below the diagonal.
    double norm_x = 0.0;
    for (double v : col_x) norm_x += v * v;
    norm_x = std::sqrt(norm_x);
    const double r00 = -detail::sign_of(col_x[0]) * norm_x;
    std::vector<double> v = col_x;
    v[0] -= r00;
    double vv = 0.0;
    for (double e : v) vv += e * e;
    detail::reflect(v, vv, col_1);
    detail::reflect(v, vv, qty);
    const double r01 = col_1[0];

    // Second reflection acts on rows 1..n-1.
    std::span<double> tail1(col_1.data() + 1, n - 1);
    std::span<double> tailq(qty.data() + 1, n - 1);
    double norm_1 = 0.0;
    for (double e : tail1) norm_1 += e * e;
    norm_1 = std::sqrt(norm_1);
    const double r11 = -detail::sign_of(tail1[0]) * norm_1;
    if (std::abs(r11) <= 1e-13 * std::sqrt(static_cast<double>(n)))
        throw rank_deficient("rank-deficient design: regressor column is numerically constant");
    std::vector<double> u(tail1.begin(), tail1.end());
    u[0] -= r11;
    double uu = 0.0;
    for (double e : u) uu += e * e;
    if (uu > 0.0) detail::reflect(u, uu, tailq);

    // Back substitution on R [alpha, A]^T = (Q^T y)[0..1].
    const double A = qty[1] / r11;
    const double alpha = (qty[0] - r01 * A) / r00;

    // Residuals from the original data; Q^T y tail would give the same SSR.
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = sys.observations[i] - (A + alpha * sys.regressors[i]);
        ssr += r * r;
    }
    PathlossParams p;
    p.intercept_A = A;
    p.exponent_alpha = alpha;
    p.residual_sigma = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2)) : 0.0;
    p.n_obs = n;
    return p;
}

/// Shared noise scale consumed by the hypothesis test.
inline double pooled_sigma(const PathlossParams& los, const PathlossParams& nlos) {
    return std::sqrt((los.residual_sigma * los.residual_sigma + nlos.residual_sigma * nlos.residual_sigma) / 2.0);
}

// ----- Grouped fits ----------------------------------------------------------

struct FitRow {
    Label scenario = Label::Los;
    std::string snr_level;
    std::optional<PathlossParams> params;
    std::string error;  // set when params is empty
};

struct FitTable {
    std::vector<FitRow> rows;

    std::size_t failures() const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const FitRow& r) { return !r.params; }));
    }

    const FitRow* find(Label scenario, std::string_view snr) const {
        for (const auto& r : rows)
            if (r.scenario == scenario && r.snr_level == snr) return &r;
        return nullptr;
    }

    /// Returns the fitted params or throws with the recorded group error.
    const PathlossParams& at(Label scenario, std::string_view snr) const {
        const auto* r = find(scenario, snr);
        if (!r) throw invalid_argument("no fit for " + std::string(to_string(scenario)) + "/" + std::string(snr));
        if (!r->params) throw invalid_argument(r->error);
        return *r->params;
    }
};

/// Orders SNR tags low < medium < high, then anything else by first appearance.
inline std::vector<std::string> ordered_snr_levels(const Dataset& ds) {
    static const std::vector<std::string> canonical{"low", "medium", "high"};
    std::vector<std::string> seen;
    for (const auto& m : ds.measurements)
        if (std::find(seen.begin(), seen.end(), m.snr_level) == seen.end()) seen.push_back(m.snr_level);
    std::vector<std::string> out;
    for (const auto& c : canonical)
        if (std::find(seen.begin(), seen.end(), c) != seen.end()) out.push_back(c);
    for (const auto& s : seen)
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    return out;
}

/// One fit per (scenario, snr_level). Both scenarios are expected for every
/// SNR level present; a missing or degenerate group becomes an error row.
inline FitTable fit_all(const Dataset& ds, double wavelength) {
    FitTable table;
    for (const auto& snr : ordered_snr_levels(ds)) {
        for (Label scenario : {Label::Los, Label::Nlos}) {
            FitRow row{scenario, snr, std::nullopt, {}};
            try {
                row.params = ls_fit(build_design(ds, MeasurementFilter{scenario, snr}, wavelength));
            } catch (const std::exception& e) {
                row.error = std::string(to_string(scenario)) + "/" + snr + ": " + e.what();
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

inline constexpr std::string_view fit_csv_header = "scenario,snr_level,alpha,A_db,sigma_db,n_obs";

inline void write_fit_csv(std::ostream& os, const FitTable& t) {
    os << fit_csv_header << '\n';
    for (const auto& r : t.rows) {
        os << to_string(r.scenario) << ',' << r.snr_level << ',';
        if (r.params)
            os << format_double(r.params->exponent_alpha) << ',' << format_double(r.params->intercept_A) << ','
               << format_double(r.params->residual_sigma) << ',' << r.params->n_obs << '\n';
        else
            os << "NA,NA,NA,0\n";
    }
}

inline void write_fit_text(std::ostream& os, const FitTable& t) {
    os << "link condition   alpha_LOS     A_LOS  alpha_NLOS    A_NLOS  sigma_LOS  sigma_NLOS\n";
    std::vector<std::string> levels;
    for (const auto& r : t.rows)
        if (std::find(levels.begin(), levels.end(), r.snr_level) == levels.end()) levels.push_back(r.snr_level);
    auto cell = [](const FitRow* r, auto get, int width) {
        std::string s = (r && r->params) ? format_fixed(get(*r->params), 2) : std::string("--");
        if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), ' ');
        return s;
    };
    auto alpha = [](const PathlossParams& p) { return p.exponent_alpha; };
    auto A = [](const PathlossParams& p) { return p.intercept_A; };
    auto sig = [](const PathlossParams& p) { return p.residual_sigma; };
    for (const auto& lvl : levels) {
        const auto* los = t.find(Label::Los, lvl);
        const auto* nlos = t.find(Label::Nlos, lvl);
        std::string name = lvl;
        name.resize(std::max<std::size_t>(name.size(), 14), ' ');
        os << name << cell(los, alpha, 11) << cell(los, A, 10) << cell(nlos, alpha, 12) << cell(nlos, A, 10)
           << cell(los, sig, 11) << cell(nlos, sig, 12) << '\n';
    }
    for (const auto& r : t.rows)
        if (!r.params) os << "error: " << r.error << '\n';
}

inline FitTable read_fit_csv(std::istream& is, const std::string& source = "<stream>") {
    std::string line;
    if (!std::getline(is, line)) throw parse_error(source + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != fit_csv_header) throw parse_error(source + ":1: unexpected header '" + line + "'");
    FitTable t;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 6) throw parse_error(source + ":" + std::to_string(lineno) + ": expected 6 fields");
        FitRow r;
        r.scenario = parse_label(f[0]);
        r.snr_level = std::string(f[1]);
        if (f[2] == "NA") {
            r.error = std::string(f[0]) + "/" + r.snr_level + ": no fit available";
        } else {
            PathlossParams p;
            p.exponent_alpha = parse_double(f[2]);
            p.intercept_A = parse_double(f[3]);
            p.residual_sigma = parse_double(f[4]);
            p.n_obs = static_cast<std::size_t>(parse_integer(f[5]));
            r.params = p;
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline FitTable read_fit_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    return read_fit_csv(is, path);
}

}  // namespace nlosid
