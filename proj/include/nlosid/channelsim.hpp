// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Synthetic indoor measurement campaign: a 1D receiver grid, a tone sent
// through AWGN in fixed-length slots, slot-averaged RSS and RSS -> pathloss.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "common.hpp"
#include "pathloss.hpp"

namespace nlosid {

struct GridGeometry {
    std::size_t num_positions = 15;
    double min_distance = 1.25;  // m
    double spacing = 0.60;       // m

    void validate() const {
        if (num_positions < 2) throw invalid_argument("geometry.num_positions must be >= 2");
        if (!(min_distance > 0.0) || !std::isfinite(min_distance))
            throw invalid_argument("geometry.min_distance must be > 0, got " + format_double(min_distance));
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw invalid_argument("geometry.spacing must be > 0, got " + format_double(spacing));
    }

    double distance(std::size_t index) const { return min_distance + static_cast<double>(index) * spacing; }

    bool operator==(const GridGeometry&) const = default;
};

struct RadioConfig {
    double carrier_freq = 2.4e9;  // Hz
    double tone_freq = 1.0e4;     // Hz
    double sample_rate = 2.0e5;   // samples/s
    double slot_length = 0.01;    // s
    double tx_amplitude = 0.4;    // normalized
    double tx_gain_db = 20.0;
    double rx_gain_db = 20.0;

    /// Unit load: P_t = A_t^2.
    double tx_power() const { return tx_amplitude * tx_amplitude; }

    std::size_t samples_per_slot() const {
        const double exact = slot_length * sample_rate;
        const double rounded = std::round(exact);
        if (!(rounded >= 1.0) || std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact))
            throw invalid_argument("radio.slot_length * radio.sample_rate must be a positive integer, got " +
                                   format_double(exact));
        return static_cast<std::size_t>(rounded);
    }

    void validate() const {
        if (!(carrier_freq > 0.0)) throw invalid_argument("radio.carrier_freq must be > 0");
        if (!(tone_freq > 0.0)) throw invalid_argument("radio.tone_freq must be > 0");
        if (!(sample_rate > 2.0 * tone_freq))
            throw invalid_argument("radio.sample_rate must exceed twice radio.tone_freq (Nyquist)");
        if (!(slot_length > 0.0)) throw invalid_argument("radio.slot_length must be > 0");
        if (!(tx_amplitude > 0.0) || !std::isfinite(tx_amplitude))
            throw invalid_argument("radio.tx_amplitude must be > 0");
        (void)samples_per_slot();
    }

    bool operator==(const RadioConfig&) const = default;
};

struct ScenarioTruth {
    Label label = Label::Los;
    PathlossParams params;
    double noise_sigma_db = 0.0;

    void validate() const {
        if (!(noise_sigma_db >= 0.0) || !std::isfinite(noise_sigma_db))
            throw invalid_argument("noise sigma must be >= 0 for " + std::string(to_string(label)));
        if (!(params.exponent_alpha >= 0.0) || !std::isfinite(params.exponent_alpha) ||
            !std::isfinite(params.intercept_A))
            throw invalid_argument("pathloss exponent must be finite and >= 0 for " + std::string(to_string(label)));
    }
};

struct Measurement {
    std::size_t position_index = 0;
    double distance = 0.0;     // m
    double pathloss_db = 0.0;  // dB
    Label scenario = Label::Los;
    std::string snr_level;

    bool operator==(const Measurement&) const = default;
};

enum class Provenance { SyntheticPathloss, SyntheticWaveform, Imported };

struct Dataset {
    std::vector<Measurement> measurements;
    GridGeometry geometry;
    RadioConfig radio;
    Provenance provenance = Provenance::SyntheticPathloss;

    std::size_t size() const noexcept { return measurements.size(); }

    void validate() const {
        if (measurements.empty()) throw invalid_argument("dataset is empty");
        for (const auto& m : measurements) {
            if (m.position_index >= geometry.num_positions)
                throw invalid_argument("position_index " + std::to_string(m.position_index) +
                                       " outside grid of " + std::to_string(geometry.num_positions));
            if (!(m.distance > 0.0)) throw invalid_argument("measurement distance must be > 0");
            if (!std::isfinite(m.pathloss_db)) throw invalid_argument("measurement pathloss must be finite");
        }
    }
};

// ----- Noise models ----------------------------------------------------------

enum class NoiseKind { Gaussian, HeavyTail };

/// Pathloss-domain shadowing. HeavyTail replaces a fraction of the Gaussian
/// draws with uniform outliers on [-halfwidth, +halfwidth] dB.
struct NoiseModel {
    NoiseKind kind = NoiseKind::Gaussian;
    double outlier_fraction = 0.1;
    double outlier_halfwidth_db = 15.0;

    void validate() const {
        if (!(outlier_fraction >= 0.0 && outlier_fraction <= 1.0))
            throw invalid_argument("noise.outlier_fraction must lie in [0, 1]");
        if (!(outlier_halfwidth_db >= 0.0)) throw invalid_argument("noise.outlier_halfwidth_db must be >= 0");
    }

    double draw(Rng& rng, double sigma_db) const {
        if (kind == NoiseKind::HeavyTail) {
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            if (u01(rng) < outlier_fraction) {
                std::uniform_real_distribution<double> outlier(-outlier_halfwidth_db, outlier_halfwidth_db);
                return outlier(rng);
            }
        }
        if (sigma_db == 0.0) return 0.0;
        std::normal_distribution<double> gauss(0.0, sigma_db);
        return gauss(rng);
    }
};

// ----- Slot synthesis --------------------------------------------------------

/// Mean of |sin(2 pi f k / fs)| over one slot: the noiseless detector output
/// per unit amplitude. Tends to 2/pi as samples per cycle grow.
inline double detector_gain(const RadioConfig& radio) {
    const std::size_t n = radio.samples_per_slot();
    const double w = 2.0 * std::numbers::pi * radio.tone_freq / radio.sample_rate;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += std::abs(std::sin(w * static_cast<double>(k)));
    return acc / static_cast<double>(n);
}

/// Slot-averaged rectified RSS of a tone in white Gaussian noise.
inline double synth_slot_rss(const RadioConfig& radio, double channel_gain, double noise_sigma_waveform, Rng& rng) {
    const std::size_t n = radio.samples_per_slot();
    if (n < 2) throw invalid_argument("a slot needs at least 2 samples");
    if (!(noise_sigma_waveform >= 0.0)) throw invalid_argument("waveform noise sigma must be >= 0");
    const double amplitude = channel_gain * radio.tx_amplitude;
    const double w = 2.0 * std::numbers::pi * radio.tone_freq / radio.sample_rate;
    std::normal_distribution<double> noise(0.0, noise_sigma_waveform > 0.0 ? noise_sigma_waveform : 1.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double s = amplitude * std::sin(w * static_cast<double>(k));
        if (noise_sigma_waveform > 0.0) s += noise(rng);
        acc += std::abs(s);
    }
    return acc / static_cast<double>(n);
}

inline double synth_slot_rss(const RadioConfig& radio, double channel_gain, double noise_sigma_waveform,
                             std::uint64_t rng_seed) {
    Rng rng = make_substream(rng_seed, 0);
    return synth_slot_rss(radio, channel_gain, noise_sigma_waveform, rng);
}

/// pathloss = P_t / P_r with P_r = RSS^2.
inline double rss_to_pathloss_db(double rss, double tx_power) {
    if (!(tx_power > 0.0)) throw invalid_argument("tx_power must be > 0");
    if (rss == 0.0) throw degenerate_measurement("zero RSS: slot carries no signal");
    if (!(rss > 0.0) || !std::isfinite(rss)) throw invalid_argument("rss must be positive and finite");
    return 10.0 * std::log10(tx_power / (rss * rss));
}

/// Channel amplitude gain that makes the noiseless detector output reproduce
/// the target pathloss: RSS^2 = P_t / PL.
inline double waveform_channel_gain(const RadioConfig& radio, double pathloss_db) {
    return std::sqrt(radio.tx_power() / db_to_linear(pathloss_db)) / (radio.tx_amplitude * detector_gain(radio));
}

// ----- Dataset generation ----------------------------------------------------

enum class Fidelity { PathlossDomain, WaveformDomain };

struct GenerationOptions {
    std::size_t n_per_position = 5000;
    Fidelity fidelity = Fidelity::PathlossDomain;
    NoiseModel noise;
    std::string snr_level = "low";
    double waveform_noise_sigma = 0.0;  // absolute receiver noise, waveform fidelity only
    std::uint64_t seed = 0;
};

/// Substream per (position, scenario): position_index * 2 + scenario code.
inline Dataset generate_dataset(const GridGeometry& geometry, const RadioConfig& radio,
                                const std::vector<ScenarioTruth>& truths, const GenerationOptions& options) {
    geometry.validate();
    radio.validate();
    options.noise.validate();
    if (options.n_per_position < 1) throw invalid_argument("n_per_position must be >= 1");
    if (truths.empty()) throw invalid_argument("at least one scenario truth is required");
    for (std::size_t i = 0; i < truths.size(); ++i) {
        truths[i].validate();
        for (std::size_t j = 0; j < i; ++j)
            if (truths[j].label == truths[i].label)
                throw invalid_argument("duplicate scenario truth for " + std::string(to_string(truths[i].label)));
    }

    const double lambda = wavelength(radio.carrier_freq);
    Dataset out;
    out.geometry = geometry;
    out.radio = radio;
    out.provenance =
        options.fidelity == Fidelity::PathlossDomain ? Provenance::SyntheticPathloss : Provenance::SyntheticWaveform;
    out.measurements.reserve(geometry.num_positions * truths.size() * options.n_per_position);

    for (std::size_t p = 0; p < geometry.num_positions; ++p) {
        const double d = geometry.distance(p);
        for (const auto& truth : truths) {
            Rng rng = make_substream(options.seed, p * 2 + static_cast<std::uint64_t>(truth.label));
            const double mean_db = model_pathloss_db(truth.params, d, lambda);
            for (std::size_t n = 0; n < options.n_per_position; ++n) {
                double z = mean_db + options.noise.draw(rng, truth.noise_sigma_db);
                if (options.fidelity == Fidelity::WaveformDomain) {
                    const double gain = waveform_channel_gain(radio, z);
                    double rss = 0.0;
                    while (rss == 0.0) rss = synth_slot_rss(radio, gain, options.waveform_noise_sigma, rng);
                    z = rss_to_pathloss_db(rss, radio.tx_power());
                }
                out.measurements.push_back(Measurement{p, d, z, truth.label, options.snr_level});
            }
        }
    }
    return out;
}

}  // namespace nlosid
