// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Run configuration, loaded from flat "key = value" text with '#' comments.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bht.hpp"
#include "channelsim.hpp"
#include "common.hpp"
#include "ml/selection.hpp"
#include "ml/split.hpp"
#include "pathloss.hpp"

namespace nlosid {

/// Generation truth for one SNR condition.
struct SnrProfile {
    std::string name;
    double tx_amplitude = 0.4;
    PathlossParams los;
    PathlossParams nlos;
    double sigma_los_db = 4.0;
    double sigma_nlos_db = 4.0;
};

/// Pathloss parameters of the three link conditions, used as generation truth.
inline std::vector<SnrProfile> default_snr_profiles() {
    auto pp = [](double A, double alpha) {
        PathlossParams p;
        p.intercept_A = A;
        p.exponent_alpha = alpha;
        return p;
    };
    return {
        {"low", 0.4, pp(50.02, 1.04), pp(53.51, 1.24), 4.0, 4.0},
        {"medium", 0.5, pp(44.89, 1.68), pp(52.20, 1.09), 4.0, 4.0},
        {"high", 0.6, pp(42.53, 1.75), pp(52.93, 0.87), 4.0, 4.0},
    };
}

struct RunConfig {
    GridGeometry geometry;
    RadioConfig radio;
    std::vector<SnrProfile> snr_profiles = default_snr_profiles();
    NoiseModel noise;
    Fidelity fidelity = Fidelity::PathlossDomain;
    double waveform_noise_sigma = 0.0;
    std::size_t n_per_position = 5000;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    ml::SplitRatios split;
    ml::TrainingConfig training;

    Priors priors;
    ThresholdMode bht_mode = ThresholdMode::PerDistance;
    std::optional<double> bht_sigma_db;  // default: pooled residual sigma of the fits

    bool report_linear_svm = false;

    double wavelength() const { return nlosid::wavelength(radio.carrier_freq); }

    const SnrProfile* profile(std::string_view name) const {
        for (const auto& p : snr_profiles)
            if (p.name == name) return &p;
        return nullptr;
    }

    std::vector<ScenarioTruth> truths(const SnrProfile& p) const {
        return {ScenarioTruth{Label::Los, p.los, p.sigma_los_db}, ScenarioTruth{Label::Nlos, p.nlos, p.sigma_nlos_db}};
    }

    void validate() const {
        geometry.validate();
        radio.validate();
        noise.validate();
        split.validate();
        priors.validate();
        if (n_per_position < 1) throw invalid_argument("n_per_position must be >= 1");
        if (snr_profiles.empty()) throw invalid_argument("snr_levels must name at least one level");
        for (const auto& p : snr_profiles) {
            if (!(p.tx_amplitude > 0.0)) throw invalid_argument("snr." + p.name + ".tx_amplitude must be > 0");
            for (const auto& t : truths(p)) t.validate();
        }
        if (bht_sigma_db && !(*bht_sigma_db > 0.0)) throw invalid_argument("bht.sigma_db must be > 0");
        if (training.c_grid.empty()) throw invalid_argument("train.c_grid must not be empty");
        if (training.gamma_grid.empty()) throw invalid_argument("train.gamma_grid must not be empty");
        for (double c : training.c_grid)
            if (!(c > 0.0)) throw invalid_argument("train.c_grid entries must be > 0");
        for (double g : training.gamma_grid)
            if (!(g > 0.0)) throw invalid_argument("train.gamma_grid entries must be > 0");
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<double> parse_list(std::string_view s) {
    std::vector<double> out;
    for (auto f : split_fields(s)) out.push_back(parse_double(f));
    return out;
}

inline bool parse_bool(std::string_view s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw parse_error("not a boolean: '" + std::string(s) + "'");
}

inline std::size_t parse_count(std::string_view s) {
    const auto v = parse_integer(s);
    if (v < 0) throw parse_error("expected a non-negative integer, got '" + std::string(s) + "'");
    return static_cast<std::size_t>(v);
}

struct ConfigEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

}  // namespace detail

/// Applies "key = value" lines on top of the defaults. Unknown keys and
/// malformed values are rejected with source:line information.
inline RunConfig parse_config(std::istream& is, const std::string& source = "<config>", RunConfig cfg = {}) {
    using namespace detail;
    std::vector<ConfigEntry> entries;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw parse_error(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        entries.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
    }

    auto where = [&](const ConfigEntry& e) { return source + ":" + std::to_string(e.line) + ": "; };

    // Keys that others depend on go first.
    for (const auto& e : entries) {
        try {
            if (e.key == "snr_levels") {
                std::vector<SnrProfile> next;
                const auto defaults = default_snr_profiles();
                for (auto name : split_fields(e.value)) {
                    const std::string n = trim(name);
                    if (n.empty()) throw parse_error("empty SNR level name");
                    auto it = std::find_if(defaults.begin(), defaults.end(), [&](const auto& p) { return p.name == n; });
                    SnrProfile p = it != defaults.end() ? *it : defaults.front();
                    p.name = n;
                    next.push_back(p);
                }
                cfg.snr_profiles = std::move(next);
            } else if (e.key == "noise.sigma_db") {
                const double s = parse_double(e.value);
                for (auto& p : cfg.snr_profiles) p.sigma_los_db = p.sigma_nlos_db = s;
            }
        } catch (const parse_error& ex) {
            throw parse_error(where(e) + ex.what());
        }
    }

    for (const auto& e : entries) {
        const auto& k = e.key;
        const auto& v = e.value;
        try {
            if (k == "snr_levels" || k == "noise.sigma_db") continue;
            if (k == "geometry.num_positions") cfg.geometry.num_positions = parse_count(v);
            else if (k == "geometry.min_distance") cfg.geometry.min_distance = parse_double(v);
            else if (k == "geometry.spacing") cfg.geometry.spacing = parse_double(v);
            else if (k == "radio.carrier_freq") cfg.radio.carrier_freq = parse_double(v);
            else if (k == "radio.tone_freq") cfg.radio.tone_freq = parse_double(v);
            else if (k == "radio.sample_rate") cfg.radio.sample_rate = parse_double(v);
            else if (k == "radio.slot_length") cfg.radio.slot_length = parse_double(v);
            else if (k == "radio.tx_gain_db") cfg.radio.tx_gain_db = parse_double(v);
            else if (k == "radio.rx_gain_db") cfg.radio.rx_gain_db = parse_double(v);
            else if (k == "noise.mode") {
                if (v == "gaussian") cfg.noise.kind = NoiseKind::Gaussian;
                else if (v == "heavy-tail") cfg.noise.kind = NoiseKind::HeavyTail;
                else throw parse_error("noise.mode must be gaussian or heavy-tail");
            } else if (k == "noise.outlier_fraction") cfg.noise.outlier_fraction = parse_double(v);
            else if (k == "noise.outlier_halfwidth_db") cfg.noise.outlier_halfwidth_db = parse_double(v);
            else if (k == "fidelity") {
                if (v == "pathloss") cfg.fidelity = Fidelity::PathlossDomain;
                else if (v == "waveform") cfg.fidelity = Fidelity::WaveformDomain;
                else throw parse_error("fidelity must be pathloss or waveform");
            } else if (k == "waveform.noise_sigma") cfg.waveform_noise_sigma = parse_double(v);
            else if (k == "n_per_position") cfg.n_per_position = parse_count(v);
            else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(parse_count(v));
            else if (k == "output_dir") cfg.output_dir = v;
            else if (k == "features") cfg.training.feature_mode = ml::parse_feature_mode(v);
            else if (k == "split.train") cfg.split.train = parse_double(v);
            else if (k == "split.validation") cfg.split.validation = parse_double(v);
            else if (k == "split.test") cfg.split.test = parse_double(v);
            else if (k == "train.c_grid") cfg.training.c_grid = parse_list(v);
            else if (k == "train.gamma_grid") cfg.training.gamma_grid = parse_list(v);
            else if (k == "train.rbf_cap_per_class") cfg.training.rbf_cap_per_class = parse_count(v);
            else if (k == "train.rbf_kkt_tol") cfg.training.rbf_svm.kkt_tol = parse_double(v);
            else if (k == "train.linear_svm_iterations") cfg.training.linear_svm.iterations = parse_count(v);
            else if (k == "train.logreg_step") cfg.training.logreg.step = parse_double(v);
            else if (k == "train.logreg_max_iter") cfg.training.logreg.max_iter = parse_count(v);
            else if (k == "bht.prior_los") {
                cfg.priors.los = parse_double(v);
                cfg.priors.nlos = 1.0 - cfg.priors.los;
            } else if (k == "bht.mode") {
                if (v == "per-distance") cfg.bht_mode = ThresholdMode::PerDistance;
                else if (v == "pooled") cfg.bht_mode = ThresholdMode::Pooled;
                else throw parse_error("bht.mode must be per-distance or pooled");
            } else if (k == "bht.sigma_db") cfg.bht_sigma_db = parse_double(v);
            else if (k == "report.include_linear_svm") cfg.report_linear_svm = parse_bool(v);
            else if (k.starts_with("snr.")) {
                // snr.<level>.<field>
                const auto rest = std::string_view(k).substr(4);
                const auto dot = rest.find('.');
                if (dot == std::string_view::npos) throw parse_error("unknown key '" + k + "'");
                const std::string level(rest.substr(0, dot));
                const std::string field(rest.substr(dot + 1));
                auto it = std::find_if(cfg.snr_profiles.begin(), cfg.snr_profiles.end(),
                                       [&](const auto& p) { return p.name == level; });
                if (it == cfg.snr_profiles.end())
                    throw parse_error("SNR level '" + level + "' is not listed in snr_levels");
                if (field == "tx_amplitude") it->tx_amplitude = parse_double(v);
                else if (field == "los.A") it->los.intercept_A = parse_double(v);
                else if (field == "los.alpha") it->los.exponent_alpha = parse_double(v);
                else if (field == "los.sigma_db") it->sigma_los_db = parse_double(v);
                else if (field == "nlos.A") it->nlos.intercept_A = parse_double(v);
                else if (field == "nlos.alpha") it->nlos.exponent_alpha = parse_double(v);
                else if (field == "nlos.sigma_db") it->sigma_nlos_db = parse_double(v);
                else throw parse_error("unknown key '" + k + "'");
            } else {
                throw parse_error("unknown key '" + k + "'");
            }
        } catch (const parse_error& ex) {
            throw parse_error(where(e) + ex.what());
        }
    }
    return cfg;
}

inline RunConfig parse_config_string(const std::string& text, RunConfig base = {}) {
    std::istringstream is(text);
    return parse_config(is, "<string>", std::move(base));
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config '" + path + "'");
    return parse_config(is, path);
}

}  // namespace nlosid
