// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Command-line front end: simulate -> fit -> bht / train -> eval -> roc -> report.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlosid/nlosid.hpp"

namespace {

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

nlosid::RunConfig resolve_config(const GlobalOptions& g) {
    nlosid::RunConfig cfg = g.config_path.empty() ? nlosid::RunConfig{} : nlosid::load_config(g.config_path);
    if (g.seed) cfg.seed = *g.seed;
    if (g.out_dir) cfg.output_dir = *g.out_dir;
    return cfg;
}

int finish(const nlosid::pipeline::Outcome& out) {
    for (const auto& e : out.errors) std::cerr << "error: " << e << '\n';
    for (const auto& f : out.files) std::cout << "wrote " << f << '\n';
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pathloss-based LOS/NLOS identification: simulation, least-squares fitting, "
                 "hypothesis testing and classifier evaluation"};
    app.footer(
        "Exit codes: 0 success, 1 fatal error, 2 partial failure (some groups, SNR levels or models failed).");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    std::uint64_t seed = 0;
    std::string out_dir;
    app.add_option("--config", g.config_path, "Run configuration (key = value lines)")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "Master seed for simulate, split and train");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory");

    auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset CSV per SNR level");

    std::vector<std::string> datasets;
    auto* fitc = app.add_subcommand("fit", "Least-squares pathloss parameters per scenario and SNR level");
    fitc->add_option("datasets", datasets, "Dataset CSV files")->required()->check(CLI::ExistingFile);

    std::string params_path;
    bool pooled = false;
    std::optional<double> prior_los;
    std::optional<double> sigma;
    auto* bhtc = app.add_subcommand("bht", "Apply the binary hypothesis test to every measurement");
    bhtc->add_option("datasets", datasets, "Dataset CSV files")->required()->check(CLI::ExistingFile);
    bhtc->add_option("--params", params_path, "Pathloss parameter CSV written by 'fit'")->required()->check(CLI::ExistingFile);
    bhtc->add_flag("--pooled", pooled, "One threshold at the mean regressor instead of one per distance");
    bhtc->add_option("--prior-los", prior_los, "Prior probability of LOS (default 0.5)");
    bhtc->add_option("--sigma", sigma, "Shared noise scale in dB (default: pooled fit residual)");

    auto* trainc = app.add_subcommand("train", "Train LR, LDA, QDA, linear SVM and RBF-SVM per SNR level");
    trainc->add_option("datasets", datasets, "Dataset CSV files")->required()->check(CLI::ExistingFile);

    std::string models_dir;
    auto* evalc = app.add_subcommand("eval", "Evaluate BHT and stored models on the test split");
    evalc->add_option("datasets", datasets, "Dataset CSV files")->required()->check(CLI::ExistingFile);
    evalc->add_option("--models", models_dir, "Directory holding model_*.json (default: output directory)");

    auto* rocc = app.add_subcommand("roc", "Write ROC point files for every method");
    rocc->add_option("datasets", datasets, "Dataset CSV files")->required()->check(CLI::ExistingFile);
    rocc->add_option("--models", models_dir, "Directory holding model_*.json (default: output directory)");

    auto* reportc = app.add_subcommand("report", "Assemble the per-method, per-SNR report from eval outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nlosid::pipeline::exit_fatal;
    }
    if (*seed_opt) g.seed = seed;
    if (*out_opt) g.out_dir = out_dir;

    try {
        auto cfg = resolve_config(g);
        if (prior_los) {
            cfg.priors.los = *prior_los;
            cfg.priors.nlos = 1.0 - *prior_los;
        }
        if (sigma) cfg.bht_sigma_db = *sigma;
        if (pooled) cfg.bht_mode = nlosid::ThresholdMode::Pooled;
        if (models_dir.empty()) models_dir = cfg.output_dir;
        cfg.validate();

        if (*sim) return finish(nlosid::pipeline::simulate(cfg, std::cout));
        if (*fitc) return finish(nlosid::pipeline::fit(cfg, datasets, std::cout));
        if (*bhtc) return finish(nlosid::pipeline::bht(cfg, datasets, params_path, std::cout));
        if (*trainc) return finish(nlosid::pipeline::train(cfg, datasets, std::cout));
        if (*evalc) return finish(nlosid::pipeline::eval(cfg, datasets, models_dir, std::cout));
        if (*rocc) return finish(nlosid::pipeline::roc_files(cfg, datasets, models_dir, std::cout));
        if (*reportc) return finish(nlosid::pipeline::report(cfg, std::cout));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nlosid::pipeline::exit_fatal;
    }
    return nlosid::pipeline::exit_fatal;
}
