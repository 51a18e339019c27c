// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "channelsim.hpp"
#include "common.hpp"

namespace nlosid {

inline constexpr std::string_view dataset_csv_header = "position_index,distance_m,pathloss_db,scenario,snr_level";

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline void write_dataset_csv(std::ostream& os, const Dataset& ds) {
    os << dataset_csv_header << '\n';
    for (const auto& m : ds.measurements) {
        os << m.position_index << ',' << format_double(m.distance) << ',' << format_double(m.pathloss_db) << ','
           << to_string(m.scenario) << ',' << m.snr_level << '\n';
    }
}

inline void write_dataset_csv(const std::string& path, const Dataset& ds) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_dataset_csv(os, ds);
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

/// Reads a dataset CSV. Geometry is reconstructed from the (index, distance)
/// pairs found in the file; the radio block keeps its defaults.
inline Dataset read_dataset_csv(std::istream& is, const std::string& source = "<stream>") {
    std::string line;
    if (!std::getline(is, line)) throw parse_error(source + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != dataset_csv_header)
        throw parse_error(source + ":1: unexpected header '" + line + "', expected '" +
                          std::string(dataset_csv_header) + "'");

    Dataset ds;
    ds.provenance = Provenance::Imported;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 5)
            throw parse_error(source + ":" + std::to_string(lineno) + ": expected 5 fields, got " +
                              std::to_string(f.size()));
        try {
            Measurement m;
            const auto idx = parse_integer(f[0]);
            if (idx < 0) throw parse_error("negative position_index");
            m.position_index = static_cast<std::size_t>(idx);
            m.distance = parse_double(f[1]);
            m.pathloss_db = parse_double(f[2]);
            m.scenario = parse_label(f[3]);
            m.snr_level = std::string(f[4]);
            ds.measurements.push_back(std::move(m));
        } catch (const parse_error& e) {
            throw parse_error(source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (ds.measurements.empty()) throw parse_error(source + ": no measurements");

    std::map<std::size_t, double> dist_by_index;
    for (const auto& m : ds.measurements) dist_by_index.emplace(m.position_index, m.distance);
    const auto [lo_idx, lo_d] = *dist_by_index.begin();
    const auto [hi_idx, hi_d] = *dist_by_index.rbegin();
    ds.geometry.num_positions = std::max<std::size_t>(2, hi_idx + 1);
    if (hi_idx > lo_idx) {
        ds.geometry.spacing = (hi_d - lo_d) / static_cast<double>(hi_idx - lo_idx);
        ds.geometry.min_distance = lo_d - static_cast<double>(lo_idx) * ds.geometry.spacing;
    } else {
        ds.geometry.min_distance = lo_d - static_cast<double>(lo_idx) * ds.geometry.spacing;
    }
    if (!(ds.geometry.min_distance > 0.0) || !(ds.geometry.spacing > 0.0)) {
        // Irregular grids still import; the inferred geometry is then nominal only.
        ds.geometry.min_distance = lo_d;
        ds.geometry.spacing = GridGeometry{}.spacing;
    }
    ds.validate();
    return ds;
}

inline Dataset read_dataset_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    return read_dataset_csv(is, path);
}

}  // namespace nlosid
