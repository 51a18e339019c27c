// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Per-method, per-SNR performance tables and ROC point files.

#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "common.hpp"
#include "dataset_io.hpp"
#include "metrics.hpp"

namespace nlosid {

struct ReportRow {
    std::string method;
    std::string snr_level;
    std::optional<double> pfa;
    std::optional<double> pmd;
    std::optional<AccuracyMetrics> accuracy;
    std::optional<double> auc;
    std::string note;  // why a row has gaps; not part of the CSV
};

inline ReportRow make_report_row(std::string method, std::string snr, const ConfusionStats& stats,
                                 std::optional<double> auc) {
    ReportRow r;
    r.method = std::move(method);
    r.snr_level = std::move(snr);
    r.pfa = stats.pfa();
    r.pmd = stats.pmd();
    r.accuracy = accuracy_metrics(stats);
    r.auc = auc;
    return r;
}

inline ReportRow gap_row(std::string method, std::string snr, std::string why) {
    ReportRow r;
    r.method = std::move(method);
    r.snr_level = std::move(snr);
    r.note = std::move(why);
    return r;
}

inline constexpr std::string_view report_csv_header =
    "method,snr_level,pfa,pmd,paper_accuracy,standard_accuracy,balanced_accuracy,auc";

namespace detail {
inline std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }
inline std::optional<double> parse_opt(std::string_view s) {
    if (s == "NA") return std::nullopt;
    return parse_double(s);
}
}  // namespace detail

inline void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
    using detail::opt_field;
    os << report_csv_header << '\n';
    for (const auto& r : rows) {
        os << r.method << ',' << r.snr_level << ',' << opt_field(r.pfa) << ',' << opt_field(r.pmd) << ',';
        if (r.accuracy)
            os << format_double(r.accuracy->paper_accuracy) << ',' << format_double(r.accuracy->standard_accuracy)
               << ',' << format_double(r.accuracy->balanced_accuracy);
        else
            os << "NA,NA,NA";
        os << ',' << opt_field(r.auc) << '\n';
    }
}

inline std::vector<ReportRow> read_report_csv(std::istream& is, const std::string& source = "<stream>") {
    std::string line;
    if (!std::getline(is, line)) throw parse_error(source + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != report_csv_header) throw parse_error(source + ":1: unexpected header '" + line + "'");
    std::vector<ReportRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 8) throw parse_error(source + ":" + std::to_string(lineno) + ": expected 8 fields");
        ReportRow r;
        r.method = std::string(f[0]);
        r.snr_level = std::string(f[1]);
        r.pfa = detail::parse_opt(f[2]);
        r.pmd = detail::parse_opt(f[3]);
        if (f[4] != "NA") r.accuracy = AccuracyMetrics{parse_double(f[4]), parse_double(f[5]), parse_double(f[6])};
        r.auc = detail::parse_opt(f[7]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<ReportRow> read_report_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    return read_report_csv(is, path);
}

/// BHT analytic rates shown next to the empirical row for the same thresholds.
struct AnalyticRow {
    std::string snr_level;
    std::optional<double> pfa;
    std::optional<double> pmd;
};

inline void write_report_text(std::ostream& os, const std::vector<ReportRow>& rows,
                              const std::vector<AnalyticRow>& analytic = {}) {
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.insert(0, w - s.size(), ' ');
        return s;
    };
    auto fx = [](const std::optional<double>& v, int p) { return v ? format_fixed(*v, p) : std::string("--"); };
    os << pad("method", 10) << pad("snr", 8) << pad("PFA", 8) << pad("PMD", 8) << pad("acc(paper)", 12)
       << pad("acc(std)", 10) << pad("acc(bal)", 10) << pad("AUC", 8) << '\n';
    for (const auto& r : rows) {
        const auto acc = [&](auto get) {
            return r.accuracy ? format_fixed(get(*r.accuracy), 2) : std::string("--");
        };
        os << pad(r.method, 10) << pad(r.snr_level, 8) << pad(fx(r.pfa, 4), 8) << pad(fx(r.pmd, 4), 8)
           << pad(acc([](const AccuracyMetrics& a) { return a.paper_accuracy; }), 12)
           << pad(acc([](const AccuracyMetrics& a) { return a.standard_accuracy; }), 10)
           << pad(acc([](const AccuracyMetrics& a) { return a.balanced_accuracy; }), 10) << pad(fx(r.auc, 4), 8);
        if (!r.note.empty()) os << "  (" << r.note << ')';
        os << '\n';
    }
    if (!analytic.empty()) {
        os << "\nBHT analytic rates (same thresholds as the empirical BHT rows)\n";
        os << pad("snr", 8) << pad("PFA", 8) << pad("PMD", 8) << '\n';
        for (const auto& a : analytic) os << pad(a.snr_level, 8) << pad(fx(a.pfa, 4), 8) << pad(fx(a.pmd, 4), 8) << '\n';
    }
    os << "\nacc(paper) = (1 - (PMD + PFA)) * 100; acc(std) = (TP + TN) / N * 100; acc(bal) = (1 - (PMD + PFA) / 2) * 100\n";
}

inline constexpr std::string_view roc_csv_header = "fpr,tpr";

inline void write_roc_csv(std::ostream& os, const RocCurve& curve) {
    os << roc_csv_header << '\n';
    for (const auto& p : curve.points) os << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

}  // namespace nlosid
