// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Log-distance pathloss model in dB:
//
//     PL_dB(d) = A + alpha * 10 log10(4 pi d / lambda)
//
// A absorbs the antenna gains (-10 log10(Gt Gr)); alpha is the pathloss exponent.

#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "common.hpp"

namespace nlosid {

inline constexpr double speed_of_light = 299'792'458.0;  // m/s, exact

struct PathlossParams {
    double intercept_A = 0.0;     // dB
    double exponent_alpha = 0.0;  // dimensionless
    double residual_sigma = 0.0;  // dB
    std::size_t n_obs = 0;

    bool operator==(const PathlossParams&) const = default;
};

inline double wavelength(double carrier_freq) {
    if (!(carrier_freq > 0.0) || !std::isfinite(carrier_freq))
        throw invalid_argument("carrier frequency must be positive, got " + format_double(carrier_freq));
    return speed_of_light / carrier_freq;
}

/// 10 log10(4 pi d / lambda)
inline double regressor_db(double distance, double wavelength) {
    if (!(distance > 0.0) || !std::isfinite(distance))
        throw invalid_argument("distance must be positive, got " + format_double(distance));
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw invalid_argument("wavelength must be positive, got " + format_double(wavelength));
    return 10.0 * std::log10(4.0 * std::numbers::pi * distance / wavelength);
}

inline double model_pathloss_db(const PathlossParams& params, double distance, double wavelength) {
    return params.intercept_A + params.exponent_alpha * regressor_db(distance, wavelength);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace nlosid
