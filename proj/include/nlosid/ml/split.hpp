// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "../common.hpp"

namespace nlosid::ml {

struct SplitRatios {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;

    void validate() const {
        if (train < 0 || validation < 0 || test < 0 || std::abs(train + validation + test - 1.0) > 1e-9)
            throw invalid_argument("split ratios must be non-negative and sum to 1");
    }
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

namespace detail {

/// Largest-remainder apportionment of `total` over `weights`; ties go to the
/// earlier slot.
inline std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights) {
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    std::vector<std::size_t> out(weights.size());
    std::vector<double> frac(weights.size());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * weights[i] / wsum;
        out[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        frac[i] = exact - static_cast<double>(out[i]);
        assigned += out[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b] + 1e-12; });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned) out[order[k % order.size()]]++;
    return out;
}

}  // namespace detail

/// Stratified shuffle split. Split sizes follow largest-remainder rounding of
/// the overall counts; each class then gets floor or ceil of its proportional
/// share in every split.
inline SplitIndices split(std::span<const Label> labels, const SplitRatios& ratios, std::uint64_t seed) {
    ratios.validate();
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<int>(labels[i])].push_back(i);
    if (by_class[0].empty() || by_class[1].empty()) throw invalid_argument("split needs samples of both classes");

    const std::array<double, 3> w{ratios.train, ratios.validation, ratios.test};
    const auto sizes = detail::apportion(labels.size(), w);
    const double n = static_cast<double>(labels.size());

    // Controlled rounding of the 2 x 3 class/split table.
    std::array<std::array<std::size_t, 3>, 2> cell{};
    std::array<std::array<double, 3>, 2> frac{};
    std::array<std::ptrdiff_t, 2> row_def{};
    std::array<std::ptrdiff_t, 3> col_def{};
    for (int s = 0; s < 3; ++s) col_def[s] = static_cast<std::ptrdiff_t>(sizes[s]);
    for (int c = 0; c < 2; ++c) {
        row_def[c] = static_cast<std::ptrdiff_t>(by_class[c].size());
        for (int s = 0; s < 3; ++s) {
            const double exact = static_cast<double>(by_class[c].size()) * static_cast<double>(sizes[s]) / n;
            cell[c][s] = static_cast<std::size_t>(std::floor(exact + 1e-9));
            frac[c][s] = exact - static_cast<double>(cell[c][s]);
            row_def[c] -= static_cast<std::ptrdiff_t>(cell[c][s]);
            col_def[s] -= static_cast<std::ptrdiff_t>(cell[c][s]);
        }
    }
    std::vector<std::pair<int, int>> order;
    for (int c = 0; c < 2; ++c)
        for (int s = 0; s < 3; ++s) order.emplace_back(c, s);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return frac[a.first][a.second] > frac[b.first][b.second] + 1e-12; });
    for (auto [c, s] : order) {
        if (row_def[c] > 0 && col_def[s] > 0) {
            cell[c][s]++;
            row_def[c]--;
            col_def[s]--;
        }
    }

    Rng rng = make_substream(seed, stream_id("split"));
    SplitIndices out;
    for (int c = 0; c < 2; ++c) {
        auto idx = by_class[c];
        std::shuffle(idx.begin(), idx.end(), rng);
        auto it = idx.begin();
        auto take = [&](std::vector<std::size_t>& dst, std::size_t k) {
            dst.insert(dst.end(), it, it + static_cast<std::ptrdiff_t>(k));
            it += static_cast<std::ptrdiff_t>(k);
        };
        take(out.train, cell[c][0]);
        take(out.validation, cell[c][1]);
        take(out.test, cell[c][2]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.validation.begin(), out.validation.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

/// Stratified random subsample of at most `cap_per_class` indices per class.
inline std::vector<std::size_t> subsample_per_class(std::span<const std::size_t> indices,
                                                    std::span<const Label> labels_of_indices,
                                                    std::size_t cap_per_class, std::uint64_t seed) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t k = 0; k < indices.size(); ++k)
        by_class[static_cast<int>(labels_of_indices[k])].push_back(indices[k]);
    Rng rng = make_substream(seed, stream_id("subsample"));
    std::vector<std::size_t> out;
    for (auto& v : by_class) {
        if (v.size() > cap_per_class) {
            std::shuffle(v.begin(), v.end(), rng);
            v.resize(cap_per_class);
        }
        out.insert(out.end(), v.begin(), v.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace nlosid::ml
