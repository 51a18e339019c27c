// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// The stages behind the command-line tool. Every stage reads and writes files
// in the configured output directory, so each one can be rerun on its own.
//
//   simulate -> dataset_<snr>.csv
//   fit      -> params.csv, params.txt
//   bht      -> decisions_<snr>.csv, bht_per_distance_<snr>.csv, bht_metrics.csv
//   train    -> model_<kind>_<snr>.json, selection_<snr>.csv
//   eval     -> metrics_<snr>.csv, analytic_<snr>.csv
//   roc      -> roc_<method>_<snr>.csv
//   report   -> report.csv, report.txt

#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "bht.hpp"
#include "channelsim.hpp"
#include "config.hpp"
#include "dataset_io.hpp"
#include "metrics.hpp"
#include "ml/model.hpp"
#include "ml/selection.hpp"
#include "ml/split.hpp"
#include "plfit.hpp"
#include "report.hpp"

namespace nlosid::pipeline {

inline constexpr int exit_ok = 0;
inline constexpr int exit_fatal = 1;
inline constexpr int exit_partial = 2;

struct Outcome {
    int exit_code = exit_ok;
    std::vector<std::string> files;
    std::vector<std::string> errors;

    void fail_partially(std::string msg) {
        errors.push_back(std::move(msg));
        if (exit_code == exit_ok) exit_code = exit_partial;
    }
};

namespace detail {

inline std::filesystem::path out_file(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    return std::filesystem::path(cfg.output_dir) / name;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    return os;
}

inline Dataset load_datasets(const std::vector<std::string>& paths) {
    if (paths.empty()) throw invalid_argument("no dataset files given");
    Dataset all = read_dataset_csv(paths.front());
    for (std::size_t i = 1; i < paths.size(); ++i) {
        Dataset next = read_dataset_csv(paths[i]);
        all.measurements.insert(all.measurements.end(), next.measurements.begin(), next.measurements.end());
        all.geometry.num_positions = std::max(all.geometry.num_positions, next.geometry.num_positions);
    }
    return all;
}

inline std::vector<std::size_t> indices_for_level(const Dataset& ds, const std::string& snr) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.measurements.size(); ++i)
        if (ds.measurements[i].snr_level == snr) idx.push_back(i);
    return idx;
}

inline std::vector<Measurement> gather(const Dataset& ds, std::span<const std::size_t> idx) {
    std::vector<Measurement> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(ds.measurements[i]);
    return out;
}

inline ml::SplitIndices split_level(const RunConfig& cfg, const Dataset& ds, const std::vector<std::size_t>& level_idx,
                                    const std::string& snr) {
    std::vector<Label> labels;
    labels.reserve(level_idx.size());
    for (auto i : level_idx) labels.push_back(ds.measurements[i].scenario);
    auto local = ml::split(labels, cfg.split, derive_seed(cfg.seed, "split", stream_id(snr)));
    // Map split positions back to dataset indices.
    for (auto* part : {&local.train, &local.validation, &local.test})
        for (auto& k : *part) k = level_idx[k];
    return local;
}

inline std::string model_file_name(ml::ModelKind kind, const std::string& snr) {
    return "model_" + std::string(to_string(kind)) + "_" + snr + ".json";
}

}  // namespace detail

// ----- simulate --------------------------------------------------------------

inline Outcome simulate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    Outcome out;
    for (std::size_t k = 0; k < cfg.snr_profiles.size(); ++k) {
        const auto& prof = cfg.snr_profiles[k];
        RadioConfig radio = cfg.radio;
        radio.tx_amplitude = prof.tx_amplitude;
        GenerationOptions opt;
        opt.n_per_position = cfg.n_per_position;
        opt.fidelity = cfg.fidelity;
        opt.noise = cfg.noise;
        opt.snr_level = prof.name;
        opt.waveform_noise_sigma = cfg.waveform_noise_sigma;
        opt.seed = derive_seed(cfg.seed, "simulate", k);
        const Dataset ds = generate_dataset(cfg.geometry, radio, cfg.truths(prof), opt);
        const auto path = detail::out_file(cfg, "dataset_" + prof.name + ".csv");
        write_dataset_csv(path.string(), ds);
        out.files.push_back(path.string());
        const std::size_t n_los = static_cast<std::size_t>(
            std::count_if(ds.measurements.begin(), ds.measurements.end(), [](const auto& m) { return m.scenario == Label::Los; }));
        log << prof.name << ": " << ds.size() << " rows (LOS " << n_los << ", NLOS " << ds.size() - n_los << ") -> "
            << path.string() << '\n';
    }
    return out;
}

// ----- fit -------------------------------------------------------------------

inline Outcome fit(const RunConfig& cfg, const std::vector<std::string>& datasets, std::ostream& log,
                   FitTable* table_out = nullptr) {
    const Dataset ds = detail::load_datasets(datasets);
    const FitTable table = fit_all(ds, cfg.wavelength());
    Outcome out;
    const auto csv = detail::out_file(cfg, "params.csv");
    const auto txt = detail::out_file(cfg, "params.txt");
    {
        auto os = detail::open_out(csv);
        write_fit_csv(os, table);
    }
    {
        auto os = detail::open_out(txt);
        write_fit_text(os, table);
    }
    write_fit_text(log, table);
    out.files = {csv.string(), txt.string()};
    for (const auto& r : table.rows)
        if (!r.params) out.fail_partially(r.error);
    if (table.failures() == table.rows.size()) out.exit_code = exit_fatal;
    if (table_out) *table_out = table;
    return out;
}

// ----- bht -------------------------------------------------------------------

inline constexpr std::string_view bht_metrics_header =
    "snr_level,threshold_mode,sigma_db,pfa,pmd,analytic_pfa,analytic_pmd,flagged";
inline constexpr std::string_view per_distance_header =
    "position_index,distance_m,n_los,n_nlos,pfa,pmd,analytic_pfa,analytic_pmd";

inline Outcome bht(const RunConfig& cfg, const std::vector<std::string>& datasets, const std::string& params_path,
                   std::ostream& log) {
    const Dataset ds = detail::load_datasets(datasets);
    const FitTable table = read_fit_csv(params_path);
    const double lambda = cfg.wavelength();
    Outcome out;
    const auto metrics_path = detail::out_file(cfg, "bht_metrics.csv");
    auto metrics = detail::open_out(metrics_path);
    metrics << bht_metrics_header << '\n';
    using nlosid::detail::opt_field;

    for (const auto& snr : ordered_snr_levels(ds)) {
        const auto* los = table.find(Label::Los, snr);
        const auto* nlos = table.find(Label::Nlos, snr);
        if (!los || !nlos || !los->params || !nlos->params) {
            out.fail_partially(snr + ": pathloss parameters missing for LOS or NLOS");
            continue;
        }
        BhtOptions opt;
        opt.priors = cfg.priors;
        opt.mode = cfg.bht_mode;
        opt.sigma = cfg.bht_sigma_db ? *cfg.bht_sigma_db : pooled_sigma(*los->params, *nlos->params);
        const auto idx = detail::indices_for_level(ds, snr);
        const auto ms = detail::gather(ds, idx);
        BhtResult res;
        try {
            res = classify_measurements(ms, *los->params, *nlos->params, lambda, opt);
        } catch (const std::exception& e) {
            out.fail_partially(snr + ": " + e.what());
            continue;
        }
        const auto dec_path = detail::out_file(cfg, "decisions_" + snr + ".csv");
        {
            auto os = detail::open_out(dec_path);
            write_decisions_csv(os, ms, res);
        }
        const auto pd_path = detail::out_file(cfg, "bht_per_distance_" + snr + ".csv");
        {
            auto os = detail::open_out(pd_path);
            os << per_distance_header << '\n';
            for (const auto& row : per_distance_rates(ms, res)) {
                os << row.position_index << ',' << format_double(row.distance) << ','
                   << row.empirical.fp + row.empirical.tn << ',' << row.empirical.tp + row.empirical.fn << ','
                   << opt_field(row.empirical.pfa()) << ',' << opt_field(row.empirical.pmd()) << ','
                   << opt_field(row.analytic ? std::optional(row.analytic->pfa) : std::nullopt) << ','
                   << opt_field(row.analytic ? std::optional(row.analytic->pmd) : std::nullopt) << '\n';
            }
        }
        const auto sum = summarize(ms, res);
        metrics << snr << ',' << to_string(opt.mode) << ',' << format_double(opt.sigma) << ','
                << opt_field(sum.empirical.pfa()) << ',' << opt_field(sum.empirical.pmd()) << ','
                << opt_field(sum.analytic_pfa) << ',' << opt_field(sum.analytic_pmd) << ',' << sum.flagged << '\n';
        log << snr << " [" << to_string(opt.mode) << ", sigma " << format_fixed(opt.sigma, 3)
            << " dB]: empirical PFA " << opt_field(sum.empirical.pfa()) << " PMD " << opt_field(sum.empirical.pmd())
            << " | analytic PFA " << opt_field(sum.analytic_pfa) << " PMD " << opt_field(sum.analytic_pmd) << '\n';
        if (sum.flagged) out.fail_partially(snr + ": " + std::to_string(sum.flagged) + " measurements at degenerate distances");
        out.files.push_back(dec_path.string());
        out.files.push_back(pd_path.string());
    }
    out.files.push_back(metrics_path.string());
    if (out.files.size() == 1) out.exit_code = exit_fatal;
    return out;
}

// ----- train -----------------------------------------------------------------

inline Outcome train(const RunConfig& cfg, const std::vector<std::string>& datasets, std::ostream& log) {
    cfg.validate();
    const Dataset ds = detail::load_datasets(datasets);
    const double lambda = cfg.wavelength();
    Outcome out;
    std::size_t saved = 0;
    for (const auto& snr : ordered_snr_levels(ds)) {
        const auto level_idx = detail::indices_for_level(ds, snr);
        ml::SplitIndices parts;
        try {
            parts = detail::split_level(cfg, ds, level_idx, snr);
        } catch (const std::exception& e) {
            out.fail_partially(snr + ": " + e.what());
            continue;
        }
        const auto tr = ml::build_features(ds, parts.train, cfg.training.feature_mode, lambda);
        const auto va = ml::build_features(ds, parts.validation, cfg.training.feature_mode, lambda);
        ml::TrainingConfig tcfg = cfg.training;
        tcfg.seed = derive_seed(cfg.seed, "train", stream_id(snr));

        const auto sel_path = detail::out_file(cfg, "selection_" + snr + ".csv");
        auto sel = detail::open_out(sel_path);
        sel << "model,C,gamma,validation_accuracy\n";
        for (auto kind : ml::all_model_kinds) {
            try {
                auto trained = ml::train_model(kind, tr, va, tcfg);
                trained.model.carrier_freq = cfg.radio.carrier_freq;
                trained.model.snr_level = snr;
                const auto path = detail::out_file(cfg, detail::model_file_name(kind, snr));
                ml::save_model(path.string(), trained.model);
                out.files.push_back(path.string());
                ++saved;
                for (const auto& e : trained.selection_log) {
                    auto hp = [&](const char* key) {
                        auto it = e.hyperparameters.find(key);
                        return it == e.hyperparameters.end() ? std::string("NA") : format_double(it->second);
                    };
                    sel << to_string(kind) << ',' << hp("C") << ',' << hp("gamma") << ','
                        << format_double(e.validation_accuracy) << '\n';
                }
                log << snr << ": trained " << to_string(kind) << " on " << trained.training_samples << " samples\n";
            } catch (const std::exception& e) {
                out.fail_partially(snr + "/" + std::string(to_string(kind)) + ": " + e.what());
            }
        }
        out.files.push_back(sel_path.string());
    }
    if (saved == 0) out.exit_code = exit_fatal;
    return out;
}

// ----- eval / roc ------------------------------------------------------------

inline constexpr std::array<std::string_view, 6> report_method_order{"LR", "RbfSVM", "BHT", "LDA", "QDA", "LinearSVM"};

struct MethodEvaluation {
    std::string method;
    std::vector<Label> truth;
    std::vector<Label> predicted;
    std::vector<double> scores;
    std::string error;  // non-empty: method unavailable
};

struct LevelEvaluation {
    std::string snr_level;
    std::vector<MethodEvaluation> methods;  // report order
    BhtSummary bht_summary;
};

/// Evaluates BHT (fitted on the training split) and every stored model on the
/// test split of one SNR level.
inline LevelEvaluation evaluate_level(const RunConfig& cfg, const Dataset& ds, const std::string& snr,
                                      const std::string& models_dir) {
    const double lambda = cfg.wavelength();
    const auto level_idx = detail::indices_for_level(ds, snr);
    const auto parts = detail::split_level(cfg, ds, level_idx, snr);
    const auto test_ms = detail::gather(ds, parts.test);

    LevelEvaluation lv;
    lv.snr_level = snr;
    for (auto name : report_method_order) {
        if (name == "LinearSVM" && !cfg.report_linear_svm) continue;
        MethodEvaluation me;
        me.method = std::string(name);
        for (const auto& m : test_ms) me.truth.push_back(m.scenario);
        try {
            if (name == "BHT") {
                Dataset train_ds;
                train_ds.measurements = detail::gather(ds, parts.train);
                const auto los = ls_fit(build_design(train_ds, {Label::Los, snr}, lambda));
                const auto nlos = ls_fit(build_design(train_ds, {Label::Nlos, snr}, lambda));
                BhtOptions opt;
                opt.priors = cfg.priors;
                opt.mode = cfg.bht_mode;
                opt.sigma = cfg.bht_sigma_db ? *cfg.bht_sigma_db : pooled_sigma(los, nlos);
                const auto res = classify_measurements(test_ms, los, nlos, lambda, opt);
                lv.bht_summary = summarize(test_ms, res);
                std::vector<Label> t2;
                for (std::size_t i = 0; i < test_ms.size(); ++i) {
                    if (res.decisions[i].flagged) continue;
                    t2.push_back(test_ms[i].scenario);
                    me.predicted.push_back(res.decisions[i].predicted);
                    me.scores.push_back(res.decisions[i].score);
                }
                me.truth = std::move(t2);
            } else {
                const auto kind = ml::parse_model_kind(name);
                const auto path = std::filesystem::path(models_dir) / detail::model_file_name(kind, snr);
                if (!std::filesystem::exists(path)) throw std::runtime_error("model file " + path.string() + " not found");
                const auto model = ml::load_model(path.string());
                const double model_lambda = nlosid::wavelength(model.carrier_freq);
                for (const auto& m : test_ms) {
                    const auto x = ml::featurize(m, model.feature_mode, model_lambda);
                    const double s = model.decision_score(x);
                    me.scores.push_back(s);
                    me.predicted.push_back(s > 0.0 ? Label::Nlos : Label::Los);
                }
            }
        } catch (const std::exception& e) {
            me.error = e.what();
            me.predicted.clear();
            me.scores.clear();
        }
        lv.methods.push_back(std::move(me));
    }
    return lv;
}

inline ReportRow to_report_row(const MethodEvaluation& me, const std::string& snr) {
    if (!me.error.empty() || me.truth.empty()) return gap_row(me.method, snr, me.error.empty() ? "no samples" : me.error);
    const auto stats = confusion(me.truth, me.predicted);
    std::optional<double> auc;
    try {
        auc = roc(me.scores, me.truth).auc;
    } catch (const std::exception&) {
    }
    return make_report_row(me.method, snr, stats, auc);
}

inline Outcome eval(const RunConfig& cfg, const std::vector<std::string>& datasets, const std::string& models_dir,
                    std::ostream& log) {
    const Dataset ds = detail::load_datasets(datasets);
    Outcome out;
    for (const auto& snr : ordered_snr_levels(ds)) {
        LevelEvaluation lv;
        try {
            lv = evaluate_level(cfg, ds, snr, models_dir);
        } catch (const std::exception& e) {
            out.fail_partially(snr + ": " + e.what());
            continue;
        }
        std::vector<ReportRow> rows;
        for (const auto& me : lv.methods) {
            rows.push_back(to_report_row(me, snr));
            if (!me.error.empty()) out.fail_partially(snr + "/" + me.method + ": " + me.error);
        }
        const auto path = detail::out_file(cfg, "metrics_" + snr + ".csv");
        {
            auto os = detail::open_out(path);
            write_report_csv(os, rows);
        }
        const auto apath = detail::out_file(cfg, "analytic_" + snr + ".csv");
        {
            auto os = detail::open_out(apath);
            os << "snr_level,pfa,pmd\n"
               << snr << ',' << nlosid::detail::opt_field(lv.bht_summary.analytic_pfa) << ','
               << nlosid::detail::opt_field(lv.bht_summary.analytic_pmd) << '\n';
        }
        write_report_text(log, rows, {{snr, lv.bht_summary.analytic_pfa, lv.bht_summary.analytic_pmd}});
        out.files.push_back(path.string());
        out.files.push_back(apath.string());
    }
    if (out.files.empty()) out.exit_code = exit_fatal;
    return out;
}

inline Outcome roc_files(const RunConfig& cfg, const std::vector<std::string>& datasets, const std::string& models_dir,
                         std::ostream& log) {
    const Dataset ds = detail::load_datasets(datasets);
    Outcome out;
    for (const auto& snr : ordered_snr_levels(ds)) {
        LevelEvaluation lv;
        try {
            lv = evaluate_level(cfg, ds, snr, models_dir);
        } catch (const std::exception& e) {
            out.fail_partially(snr + ": " + e.what());
            continue;
        }
        for (const auto& me : lv.methods) {
            if (!me.error.empty()) {
                out.fail_partially(snr + "/" + me.method + ": " + me.error);
                continue;
            }
            try {
                const auto curve = roc(me.scores, me.truth);
                const auto path = detail::out_file(cfg, "roc_" + me.method + "_" + snr + ".csv");
                auto os = detail::open_out(path);
                write_roc_csv(os, curve);
                out.files.push_back(path.string());
                log << snr << '/' << me.method << ": AUC " << format_fixed(curve.auc, 4) << " ("
                    << curve.points.size() << " points)\n";
            } catch (const std::exception& e) {
                out.fail_partially(snr + "/" + me.method + ": " + e.what());
            }
        }
    }
    if (out.files.empty()) out.exit_code = exit_fatal;
    return out;
}

// ----- report ----------------------------------------------------------------

/// Collects metrics_<snr>.csv for every configured SNR level (then any other
/// metrics files present) into report.csv / report.txt.
inline Outcome report(const RunConfig& cfg, std::ostream& log) {
    Outcome out;
    std::vector<std::string> levels;
    for (const auto& p : cfg.snr_profiles) levels.push_back(p.name);
    std::set<std::string> extra;
    if (std::filesystem::exists(cfg.output_dir))
        for (const auto& entry : std::filesystem::directory_iterator(cfg.output_dir)) {
            const auto name = entry.path().filename().string();
            if (name.starts_with("metrics_") && name.ends_with(".csv")) {
                const auto lvl = name.substr(8, name.size() - 12);
                if (std::find(levels.begin(), levels.end(), lvl) == levels.end()) extra.insert(lvl);
            }
        }
    levels.insert(levels.end(), extra.begin(), extra.end());

    std::vector<ReportRow> rows;
    std::vector<AnalyticRow> analytic;
    std::size_t found = 0;
    for (const auto& snr : levels) {
        const auto path = std::filesystem::path(cfg.output_dir) / ("metrics_" + snr + ".csv");
        std::vector<ReportRow> level_rows;
        if (std::filesystem::exists(path)) {
            level_rows = read_report_csv(path.string());
            ++found;
        } else {
            out.fail_partially(snr + ": no evaluation found (" + path.string() + ")");
        }
        for (auto name : report_method_order) {
            if (name == "LinearSVM" && !cfg.report_linear_svm) continue;
            auto it = std::find_if(level_rows.begin(), level_rows.end(), [&](const auto& r) { return r.method == name; });
            rows.push_back(it != level_rows.end() ? *it : gap_row(std::string(name), snr, "not evaluated"));
        }
        const auto apath = std::filesystem::path(cfg.output_dir) / ("analytic_" + snr + ".csv");
        if (std::filesystem::exists(apath)) {
            std::ifstream is(apath);
            std::string line;
            std::getline(is, line);
            if (std::getline(is, line)) {
                const auto f = split_fields(line);
                if (f.size() == 3) analytic.push_back({snr, nlosid::detail::parse_opt(f[1]), nlosid::detail::parse_opt(f[2])});
            }
        }
    }
    const auto csv = detail::out_file(cfg, "report.csv");
    const auto txt = detail::out_file(cfg, "report.txt");
    {
        auto os = detail::open_out(csv);
        write_report_csv(os, rows);
    }
    {
        auto os = detail::open_out(txt);
        write_report_text(os, rows, analytic);
    }
    write_report_text(log, rows, analytic);
    out.files = {csv.string(), txt.string()};
    if (found == 0) out.exit_code = exit_fatal;
    return out;
}

}  // namespace nlosid::pipeline
