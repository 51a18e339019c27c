// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace nlosid {

// ----- Errors ----------------------------------------------------------------

struct invalid_argument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Regressors carry fewer than two distinct values.
struct rank_deficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Zero RSS, or a measurement that cannot be mapped to a finite pathloss.
struct degenerate_measurement : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// m0 == m1: the two hypotheses cannot be told apart.
struct degenerate_hypotheses : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singular_covariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct non_convergence : std::runtime_error {
    non_convergence(const std::string& what, double max_violation)
        : std::runtime_error(what), max_kkt_violation(max_violation) {}
    double max_kkt_violation;
};

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ----- Labels ----------------------------------------------------------------

/// Positive class is NLOS everywhere (class 1, sign +1).
enum class Label : int { Los = 0, Nlos = 1 };

inline constexpr double label_sign(Label l) noexcept { return l == Label::Nlos ? 1.0 : -1.0; }

inline constexpr std::string_view to_string(Label l) noexcept {
    return l == Label::Nlos ? "NLOS" : "LOS";
}

inline Label parse_label(std::string_view s) {
    if (s == "LOS") return Label::Los;
    if (s == "NLOS") return Label::Nlos;
    throw parse_error("unknown scenario label '" + std::string(s) + "' (expected LOS or NLOS)");
}

// ----- Random substreams -----------------------------------------------------

using Rng = std::mt19937_64;

/// Independent generator for (master seed, stream id).
inline Rng make_substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    return Rng(seq);
}

/// FNV-1a, used to turn stage names ("simulate", "split", "train") into stream ids.
inline constexpr std::uint64_t stream_id(std::string_view name, std::uint64_t index = 0) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    h ^= index + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stage, std::uint64_t index = 0) {
    auto rng = make_substream(master_seed, stream_id(stage, index));
    return rng();
}

// ----- Number formatting -----------------------------------------------------

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

/// Fixed-precision formatting for human-readable tables.
inline std::string format_fixed(double v, int precision) {
    if (!std::isfinite(v)) return format_double(v);
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, precision);
    return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw parse_error("not a number: '" + std::string(s) + "'");
    return v;
}

inline long long parse_integer(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw parse_error("not an integer: '" + std::string(s) + "'");
    return v;
}

}  // namespace nlosid
