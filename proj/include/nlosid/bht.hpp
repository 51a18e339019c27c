// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Binary hypothesis test on a single pathloss measurement z:
//
//     H0 (LOS):  z ~ N(m0, sigma^2)      H1 (NLOS):  z ~ N(m1, sigma^2)
//
// with m0, m1 given by the fitted pathloss models at the link distance. The
// log-likelihood ratio test reduces to a threshold
//
//     delta = sigma^2 ln(eta) / (m1 - m0) + (m0 + m1) / 2,   eta = pi0 / pi1.

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "channelsim.hpp"
#include "common.hpp"
#include "metrics.hpp"
#include "pathloss.hpp"

namespace nlosid {

/// Upper-tail probability of the standard normal.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

enum class Direction { NlosAbove, NlosBelow };

struct Priors {
    double los = 0.5;
    double nlos = 0.5;

    void validate() const {
        if (!(los > 0.0) || !(nlos > 0.0) || std::abs(los + nlos - 1.0) > 1e-12)
            throw invalid_argument("priors must be positive and sum to 1");
    }
};

struct HypothesisPair {
    double m0 = 0.0;
    double m1 = 0.0;
    double sigma = 1.0;
    Priors priors;
    double threshold_delta = 0.0;
    Direction direction = Direction::NlosAbove;

    double direction_sign() const noexcept { return direction == Direction::NlosAbove ? 1.0 : -1.0; }
};

struct ErrorRates {
    double pfa = 0.0;
    double pd = 0.0;
    double pmd = 0.0;
};

struct HypothesisMeans {
    double m0 = 0.0;
    double m1 = 0.0;
};

inline HypothesisMeans hypothesis_means(const PathlossParams& los, const PathlossParams& nlos, double distance,
                                        double wavelength) {
    return {model_pathloss_db(los, distance, wavelength), model_pathloss_db(nlos, distance, wavelength)};
}

inline double llrt_threshold(double m0, double m1, double sigma, const Priors& priors) {
    if (m0 == m1) throw degenerate_hypotheses("degenerate hypotheses: m0 == m1 == " + format_double(m0));
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw invalid_argument("sigma must be > 0");
    priors.validate();
    const double eta = priors.los / priors.nlos;
    return sigma * sigma * std::log(eta) / (m1 - m0) + (m0 + m1) / 2.0;
}

inline HypothesisPair make_hypothesis_pair(double m0, double m1, double sigma, const Priors& priors = {}) {
    HypothesisPair p;
    p.m0 = m0;
    p.m1 = m1;
    p.sigma = sigma;
    p.priors = priors;
    p.threshold_delta = llrt_threshold(m0, m1, sigma, priors);
    p.direction = m1 > m0 ? Direction::NlosAbove : Direction::NlosBelow;
    return p;
}

/// Ties (z == delta) keep H0.
inline Label classify(double z, const HypothesisPair& pair) {
    if (pair.direction == Direction::NlosAbove) return z > pair.threshold_delta ? Label::Nlos : Label::Los;
    return z < pair.threshold_delta ? Label::Nlos : Label::Los;
}

/// Continuous score, higher = more NLOS; classify() is score > 0.
inline double bht_score(double z, const HypothesisPair& pair) {
    return (z - pair.threshold_delta) * pair.direction_sign();
}

inline ErrorRates analytic_rates(const HypothesisPair& pair) {
    const double s = pair.direction_sign();
    ErrorRates r;
    r.pfa = q_function(s * (pair.threshold_delta - pair.m0) / pair.sigma);
    r.pd = q_function(s * (pair.threshold_delta - pair.m1) / pair.sigma);
    r.pmd = 1.0 - r.pd;
    return r;
}

// ----- Batch application -----------------------------------------------------

enum class ThresholdMode { PerDistance, Pooled };

inline std::string_view to_string(ThresholdMode m) noexcept {
    return m == ThresholdMode::PerDistance ? "per-distance" : "pooled";
}

struct BhtOptions {
    double sigma = 1.0;
    Priors priors;
    ThresholdMode mode = ThresholdMode::PerDistance;
};

struct BhtDecision {
    Label predicted = Label::Los;
    double score = 0.0;
    bool flagged = false;  // degenerate pair at this distance
};

struct BhtResult {
    std::vector<BhtDecision> decisions;  // parallel to the input measurements
    std::map<double, std::optional<HypothesisPair>> pairs;  // keyed by distance (pooled: single entry at key 0)
    ThresholdMode mode = ThresholdMode::PerDistance;

    const std::optional<HypothesisPair>& pair_for(double distance) const {
        return pairs.at(mode == ThresholdMode::Pooled ? 0.0 : distance);
    }
};

inline BhtResult classify_measurements(std::span<const Measurement> ms, const PathlossParams& los,
                                       const PathlossParams& nlos, double wavelength, const BhtOptions& opt) {
    opt.priors.validate();
    if (!(opt.sigma > 0.0)) throw invalid_argument("sigma must be > 0");
    BhtResult out;
    out.mode = opt.mode;
    auto build = [&](double m0, double m1) -> std::optional<HypothesisPair> {
        if (m0 == m1) return std::nullopt;
        return make_hypothesis_pair(m0, m1, opt.sigma, opt.priors);
    };
    if (opt.mode == ThresholdMode::Pooled) {
        if (ms.empty()) throw invalid_argument("pooled threshold needs at least one measurement");
        double xbar = 0.0;
        for (const auto& m : ms) xbar += regressor_db(m.distance, wavelength);
        xbar /= static_cast<double>(ms.size());
        out.pairs[0.0] = build(los.intercept_A + los.exponent_alpha * xbar,
                               nlos.intercept_A + nlos.exponent_alpha * xbar);
    }
    out.decisions.reserve(ms.size());
    for (const auto& m : ms) {
        if (opt.mode == ThresholdMode::PerDistance && !out.pairs.contains(m.distance)) {
            const auto means = hypothesis_means(los, nlos, m.distance, wavelength);
            out.pairs[m.distance] = build(means.m0, means.m1);
        }
        const auto& pair = out.pair_for(m.distance);
        if (!pair) {
            out.decisions.push_back({Label::Los, std::nan(""), true});
            continue;
        }
        out.decisions.push_back({classify(m.pathloss_db, *pair), bht_score(m.pathloss_db, *pair), false});
    }
    return out;
}

inline BhtResult classify_dataset(const Dataset& ds, const PathlossParams& los, const PathlossParams& nlos,
                                  double wavelength, const BhtOptions& opt) {
    return classify_measurements(ds.measurements, los, nlos, wavelength, opt);
}

/// Empirical confusion over unflagged measurements, and the analytic rates
/// averaged over the same measurements' pairs (per class).
struct BhtSummary {
    ConfusionStats empirical;
    std::optional<double> analytic_pfa;
    std::optional<double> analytic_pmd;
    std::size_t flagged = 0;
};

inline BhtSummary summarize(std::span<const Measurement> ms, const BhtResult& r) {
    BhtSummary s;
    double sum_pfa = 0.0, sum_pmd = 0.0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto& d = r.decisions[i];
        if (d.flagged) {
            ++s.flagged;
            continue;
        }
        accumulate(s.empirical, ms[i].scenario, d.predicted);
        const auto rates = analytic_rates(*r.pair_for(ms[i].distance));
        if (ms[i].scenario == Label::Los) {
            sum_pfa += rates.pfa;
            ++n0;
        } else {
            sum_pmd += rates.pmd;
            ++n1;
        }
    }
    if (n0) s.analytic_pfa = sum_pfa / static_cast<double>(n0);
    if (n1) s.analytic_pmd = sum_pmd / static_cast<double>(n1);
    return s;
}

struct DistanceRates {
    std::size_t position_index = 0;
    double distance = 0.0;
    ConfusionStats empirical;
    std::optional<ErrorRates> analytic;  // empty when flagged
};

inline std::vector<DistanceRates> per_distance_rates(std::span<const Measurement> ms, const BhtResult& r) {
    std::map<double, DistanceRates> by_distance;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        auto& row = by_distance[ms[i].distance];
        row.position_index = ms[i].position_index;
        row.distance = ms[i].distance;
        const auto& pair = r.pair_for(ms[i].distance);
        if (!pair) continue;
        if (!row.analytic) row.analytic = analytic_rates(*pair);
        accumulate(row.empirical, ms[i].scenario, r.decisions[i].predicted);
    }
    std::vector<DistanceRates> out;
    for (auto& [d, row] : by_distance) out.push_back(row);
    return out;
}

inline constexpr std::string_view decisions_csv_header = "position_index,distance_m,pathloss_db,score,decision,truth";

inline void write_decisions_csv(std::ostream& os, std::span<const Measurement> ms, const BhtResult& r) {
    os << decisions_csv_header << '\n';
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto& d = r.decisions[i];
        os << ms[i].position_index << ',' << format_double(ms[i].distance) << ',' << format_double(ms[i].pathloss_db)
           << ',';
        if (d.flagged)
            os << "NA,NA,";
        else
            os << format_double(d.score) << ',' << to_string(d.predicted) << ',';
        os << to_string(ms[i].scenario) << '\n';
    }
}

}  // namespace nlosid
