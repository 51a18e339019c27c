// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------
//
// Acceptance suite. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails. Usage: nlosid_acceptance [work_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlosid/nlosid.hpp"
#include "oracles.hpp"

using namespace nlosid;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string num(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const std::vector<SnrProfile>& table_one() {
    static const auto p = default_snr_profiles();
    return p;
}

// ----- 1. least-squares recovery ---------------------------------------------

Verdict ls_recovery() {
    Verdict v;
    const GridGeometry geom;
    const RadioConfig radio;
    const double lambda = wavelength(radio.carrier_freq);

    for (const auto& prof : table_one())
        for (Label l : {Label::Los, Label::Nlos}) {
            const auto& truth = l == Label::Los ? prof.los : prof.nlos;
            GenerationOptions opt;
            opt.n_per_position = 3;
            opt.snr_level = prof.name;
            const auto ds = generate_dataset(geom, radio, {{l, truth, 0.0}}, opt);
            const auto fit = ls_fit(build_design(ds, {l, prof.name}, lambda));
            const double err = std::max(std::abs(fit.intercept_A - truth.intercept_A),
                                        std::abs(fit.exponent_alpha - truth.exponent_alpha));
            v.require(err <= 1e-9, prof.name + "/" + std::string(to_string(l)) + " noiseless error " + num(err));
        }

    const double sigma = 2.0;
    int inside = 0;
    for (int run = 0; run < 100; ++run) {
        const auto& prof = table_one()[static_cast<std::size_t>(run / 2) % 3];
        const Label l = run % 2 ? Label::Nlos : Label::Los;
        const auto& truth = l == Label::Los ? prof.los : prof.nlos;
        GenerationOptions opt;
        opt.n_per_position = 5000;
        opt.snr_level = prof.name;
        opt.seed = 1000 + static_cast<std::uint64_t>(run);
        const auto ds = generate_dataset(geom, radio, {{l, truth, sigma}}, opt);
        const auto sys = build_design(ds, {l, prof.name}, lambda);
        const auto fit = ls_fit(sys);
        const double se = oracle::slope_se(sys.regressors, sigma);
        inside += std::abs(fit.exponent_alpha - truth.exponent_alpha) <= 4.0 * se;
    }
    v.require(inside >= 95, "alpha within 4 SE in only " + std::to_string(inside) + "/100 runs");
    if (v.pass) v.detail = "six pairs exact to 1e-9; alpha within 4 SE in " + std::to_string(inside) + "/100 runs";
    return v;
}

// ----- 2. BHT analytic vs empirical -------------------------------------------

Verdict bht_rates() {
    Verdict v;
    const std::size_t M = 100'000;
    const auto pair = make_hypothesis_pair(0.0, 2.0, 1.0);
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, 1.0);
    std::size_t fa = 0, md = 0;
    for (std::size_t i = 0; i < M; ++i) fa += classify(g(rng), pair) == Label::Nlos;
    for (std::size_t i = 0; i < M; ++i) md += classify(2.0 + g(rng), pair) == Label::Los;
    const double q1 = oracle::q_integral(1.0);
    const double bound = 3.0 * std::sqrt(q1 * (1.0 - q1) / static_cast<double>(M));
    const double pfa = static_cast<double>(fa) / static_cast<double>(M);
    const double pmd = static_cast<double>(md) / static_cast<double>(M);
    v.require(std::abs(pfa - q1) <= bound, "PFA " + num(pfa) + " vs Q(1) " + num(q1));
    v.require(std::abs(pmd - q1) <= bound, "PMD " + num(pmd) + " vs Q(1) " + num(q1));
    v.require(std::abs(q1 - 0.158655) < 5e-7, "oracle Q(1) = " + num(q1, 10));
    if (v.pass) v.detail = "PFA " + num(pfa) + ", PMD " + num(pmd) + ", Q(1) " + num(q1) + ", bound " + num(bound);
    return v;
}

// ----- 3. Q-function ----------------------------------------------------------

Verdict q_accuracy() {
    Verdict v;
    double worst = 0.0, at = 0.0;
    for (int k = -800; k <= 800; ++k) {
        const double x = k / 100.0;
        const double err = std::abs(q_function(x) - oracle::q_integral(x));
        if (err > worst) {
            worst = err;
            at = x;
        }
    }
    v.require(worst <= 1e-10, "max error " + num(worst) + " at x = " + num(at));
    if (v.pass) v.detail = "max |error| " + num(worst, 3) + " over 1601 points";
    return v;
}

// ----- 4. SVM dual optimality -------------------------------------------------

Verdict svm_dual() {
    Verdict v;
    double worst_gap = 0.0, worst_feas = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        const std::size_t n = 4 + seed % 9;  // 4..12
        Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 2);
        std::vector<Label> y;
        for (std::size_t i = 0; i < n; ++i) {
            const bool pos = i % 2 == 1;
            X.row(static_cast<Eigen::Index>(i)) << g(rng) + (pos ? 0.8 : 0.0), g(rng);
            y.push_back(pos ? Label::Nlos : Label::Los);
        }
        const double C = seed % 2 ? 1.0 : 10.0;
        const double gamma = 0.5;
        ml::RbfSvmConfig cfg;
        cfg.standardize = false;
        ml::RbfSvmTrainInfo info;
        ml::train_rbf_svm(X, y, C, gamma, cfg, &info);

        oracle::DualProblem p;
        p.C = C;
        for (Label l : y) p.y.push_back(label_sign(l));
        p.Q.assign(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                p.Q[i][j] = p.y[i] * p.y[j] *
                            std::exp(-gamma * (X.row(static_cast<Eigen::Index>(i)) - X.row(static_cast<Eigen::Index>(j))).squaredNorm());
        const auto ref = oracle::projected_gradient_dual(p, 1e-8);
        v.require(ref.stationarity < 1e-8, "oracle did not reach 1e-8 on seed " + std::to_string(seed));

        // objective of the returned dual vector, recomputed independently
        const double got = oracle::dual_value(p, info.alpha);
        const double gap = std::abs(got - ref.objective);
        worst_gap = std::max(worst_gap, gap);
        double eq = 0.0, box = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            eq += info.alpha[i] * p.y[i];
            box = std::max({box, -info.alpha[i], info.alpha[i] - C});
        }
        worst_feas = std::max({worst_feas, std::abs(eq), box});
        v.require(gap <= 1e-3, "seed " + std::to_string(seed) + ": objective gap " + num(gap));
        v.require(std::abs(eq) <= 1e-6 && box <= 1e-6, "seed " + std::to_string(seed) + ": infeasible");
    }
    if (v.pass) v.detail = "20 datasets; max objective gap " + num(worst_gap, 3) + ", max feasibility violation " + num(worst_feas, 3);
    return v;
}

// ----- 5. Bayes consistency ---------------------------------------------------

/// Class 0 ~ N(0, S0), class 1 ~ N(mu, S1), both mapped through x -> R x + t.
ml::LabelledFeatures gaussian_pair(std::size_t n_per_class, const Eigen::Vector2d& mu, const Eigen::Matrix2d& A0,
                                   const Eigen::Matrix2d& A1, std::uint64_t seed) {
    const double th = 0.6;
    Eigen::Matrix2d R;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Eigen::Vector2d t(70.0, 20.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ml::LabelledFeatures f;
    f.X.resize(static_cast<Eigen::Index>(2 * n_per_class), 2);
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const bool pos = i % 2 == 1;
        const Eigen::Vector2d z(g(rng), g(rng));
        const Eigen::Vector2d x = pos ? Eigen::Vector2d(mu + A1 * z) : Eigen::Vector2d(A0 * z);
        f.X.row(static_cast<Eigen::Index>(i)) = (R * x + t).transpose();
        f.y.push_back(pos ? Label::Nlos : Label::Los);
    }
    return f;
}

double test_accuracy(const ml::DiscriminantModel& m, const ml::LabelledFeatures& test) {
    std::size_t ok = 0;
    for (Eigen::Index i = 0; i < test.X.rows(); ++i)
        ok += (m.score(test.X.row(i).transpose()) > 0.0) == (test.y[static_cast<std::size_t>(i)] == Label::Nlos);
    return 100.0 * static_cast<double>(ok) / static_cast<double>(test.size());
}

Verdict bayes_consistency() {
    Verdict v;
    // QDA: N(0, I) vs N((m, 0), diag(1, s^2))
    const double m = 1.5, s = 2.0;
    Eigen::Matrix2d I = Eigen::Matrix2d::Identity(), S;
    S << 1.0, 0.0, 0.0, s;
    const auto train_q = gaussian_pair(10'000, {m, 0.0}, I, S, 51);
    const auto test_q = gaussian_pair(100'000, {m, 0.0}, I, S, 52);
    const double bayes_q = 100.0 * oracle::bayes_accuracy_2d(m, s);
    const double acc_q = test_accuracy(ml::train_qda(train_q.X, train_q.y), test_q);
    v.require(std::abs(acc_q - bayes_q) <= 1.0, "QDA " + num(acc_q) + "% vs Bayes " + num(bayes_q) + "%");

    // LDA: shared covariance A A^T, Bayes accuracy 1 - Q(Delta / 2)
    Eigen::Matrix2d A;
    A << 1.2, 0.0, 0.7, 0.9;
    const Eigen::Vector2d mu(1.0, 1.5);
    const double delta = A.triangularView<Eigen::Lower>().solve(mu).norm();
    const auto train_l = gaussian_pair(10'000, mu, A, A, 53);
    const auto test_l = gaussian_pair(100'000, mu, A, A, 54);
    const double bayes_l = 100.0 * (1.0 - oracle::q_integral(delta / 2.0));
    const double acc_l = test_accuracy(ml::train_lda(train_l.X, train_l.y), test_l);
    v.require(std::abs(acc_l - bayes_l) <= 1.0, "LDA " + num(acc_l) + "% vs Bayes " + num(bayes_l) + "%");
    if (v.pass)
        v.detail = "QDA " + num(acc_q, 5) + "% vs " + num(bayes_q, 5) + "%; LDA " + num(acc_l, 5) + "% vs " + num(bayes_l, 5) + "%";
    return v;
}

// ----- 6. AUC closed form -----------------------------------------------------

Verdict auc_closed_form() {
    Verdict v;
    const std::size_t n = 100'000;
    const double sigma = 3.0;
    const auto pair = make_hypothesis_pair(60.0, 60.0 + 2.0 * sigma, sigma);
    std::mt19937_64 rng(606);
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<double> scores;
    std::vector<Label> truth;
    for (std::size_t i = 0; i < n; ++i) {
        scores.push_back(bht_score(pair.m0 + g(rng), pair));
        truth.push_back(Label::Los);
        scores.push_back(bht_score(pair.m1 + g(rng), pair));
        truth.push_back(Label::Nlos);
    }
    const double auc = roc(scores, truth).auc;
    const double ref = oracle::binormal_auc(2.0);
    v.require(std::abs(auc - ref) <= 0.005, "AUC " + num(auc) + " vs " + num(ref));
    if (v.pass) v.detail = "AUC " + num(auc) + " vs Phi(sqrt 2) " + num(ref);
    return v;
}

// ----- 7. end-to-end pipeline -------------------------------------------------

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream is(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        std::vector<std::string> r;
        for (auto f : split_fields(line)) r.emplace_back(f);
        rows.push_back(r);
    }
    return rows;
}

Verdict end_to_end(const fs::path& work) {
    Verdict v;
    RunConfig cfg = parse_config_string("snr_levels = low\n");
    const auto& low = cfg.snr_profiles.front();
    const double lambda = cfg.wavelength();
    const std::size_t mid = cfg.geometry.num_positions / 2;
    const auto means = hypothesis_means(low.los, low.nlos, cfg.geometry.distance(mid), lambda);
    const double sigma = std::abs(means.m1 - means.m0) / 2.0;
    for (auto& p : cfg.snr_profiles) p.sigma_los_db = p.sigma_nlos_db = sigma;
    cfg.output_dir = (work / "e2e").string();
    fs::remove_all(cfg.output_dir);

    std::ostringstream log;
    const auto sim = pipeline::simulate(cfg, log);
    v.require(sim.exit_code == pipeline::exit_ok, "simulate failed");
    const std::vector<std::string> data{(fs::path(cfg.output_dir) / "dataset_low.csv").string()};
    v.require(pipeline::fit(cfg, data, log).exit_code == pipeline::exit_ok, "fit failed");
    const auto params = (fs::path(cfg.output_dir) / "params.csv").string();
    v.require(pipeline::bht(cfg, data, params, log).exit_code == pipeline::exit_ok, "bht failed");
    pipeline::eval(cfg, data, cfg.output_dir, log);  // ML rows are gaps here: partial is expected
    v.require(pipeline::report(cfg, log).exit_code == pipeline::exit_ok, "report failed");
    if (!v.pass) return v;

    const auto rows = read_csv(fs::path(cfg.output_dir) / "bht_per_distance_low.csv");
    v.require(rows.size() == cfg.geometry.num_positions, "expected one row per grid distance");
    double worst = 0.0;
    for (const auto& r : rows) {
        const double n0 = std::stod(r[2]), n1 = std::stod(r[3]);
        const double pfa = std::stod(r[4]), pmd = std::stod(r[5]);
        const double apfa = std::stod(r[6]), apmd = std::stod(r[7]);
        const double se0 = std::sqrt(apfa * (1.0 - apfa) / n0), se1 = std::sqrt(apmd * (1.0 - apmd) / n1);
        const double z0 = std::abs(pfa - apfa) / se0, z1 = std::abs(pmd - apmd) / se1;
        worst = std::max({worst, z0, z1});
        v.require(z0 <= 3.0, "distance " + r[1] + ": PFA " + r[4] + " vs " + r[6] + " (" + num(z0, 3) + " SE)");
        v.require(z1 <= 3.0, "distance " + r[1] + ": PMD " + r[5] + " vs " + r[7] + " (" + num(z1, 3) + " SE)");
    }
    if (v.pass)
        v.detail = "sigma " + num(sigma, 5) + " dB; worst deviation " + num(worst, 3) + " SE over " +
                   std::to_string(rows.size()) + " distances";
    return v;
}

// ----- 8. heavy-tail ordering -------------------------------------------------

Verdict heavy_tail_ordering(const fs::path& work) {
    Verdict v;
    RunConfig cfg = parse_config_string(R"(
        snr_levels = low
        noise.mode = heavy-tail
        n_per_position = 2000
        train.rbf_cap_per_class = 1500
    )");
    cfg.output_dir = (work / "heavy").string();
    fs::remove_all(cfg.output_dir);
    std::ostringstream log;
    pipeline::simulate(cfg, log);
    const std::vector<std::string> data{(fs::path(cfg.output_dir) / "dataset_low.csv").string()};
    const auto tr = pipeline::train(cfg, data, log);
    v.require(tr.exit_code == pipeline::exit_ok, "train did not complete");
    v.require(pipeline::eval(cfg, data, cfg.output_dir, log).exit_code == pipeline::exit_ok, "eval did not complete");
    if (!v.pass) return v;
    const auto rows = read_report_csv((fs::path(cfg.output_dir) / "metrics_low.csv").string());
    std::optional<double> rbf, bht;
    for (const auto& r : rows) {
        if (!r.accuracy) continue;
        if (r.method == "RbfSVM") rbf = r.accuracy->standard_accuracy;
        if (r.method == "BHT") bht = r.accuracy->standard_accuracy;
    }
    v.require(rbf && bht, "missing RbfSVM or BHT row");
    if (!v.pass) return v;
    v.require(*rbf >= *bht - 1.0, "RbfSVM " + num(*rbf) + "% < BHT " + num(*bht) + "% - 1");
    if (v.pass) v.detail = "test accuracy RbfSVM " + num(*rbf, 5) + "%, BHT " + num(*bht, 5) + "%";
    return v;
}

// ----- 9. determinism ---------------------------------------------------------

Verdict determinism(const fs::path& work) {
    Verdict v;
    auto run = [&](const std::string& name) {
        RunConfig cfg = parse_config_string(R"(
            seed = 99
            n_per_position = 60
            train.rbf_cap_per_class = 150
        )");
        cfg.output_dir = (work / name).string();
        fs::remove_all(cfg.output_dir);
        std::ostringstream log;
        pipeline::simulate(cfg, log);
        std::vector<std::string> data;
        for (const auto& p : cfg.snr_profiles) data.push_back((fs::path(cfg.output_dir) / ("dataset_" + p.name + ".csv")).string());
        pipeline::fit(cfg, data, log);
        pipeline::bht(cfg, data, (fs::path(cfg.output_dir) / "params.csv").string(), log);
        pipeline::train(cfg, data, log);
        pipeline::eval(cfg, data, cfg.output_dir, log);
        pipeline::report(cfg, log);
        return slurp(fs::path(cfg.output_dir) / "report.csv");
    };
    const auto a = run("det_a");
    const auto b = run("det_b");
    v.require(!a.empty(), "no report written");
    v.require(a == b, "report.csv differs between identical runs");
    const auto lines = std::count(a.begin(), a.end(), '\n');
    v.require(lines == 16, "report.csv has " + std::to_string(lines) + " lines");
    if (v.pass) v.detail = "report.csv byte-identical (" + std::to_string(a.size()) + " bytes)";
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "nlosid_acceptance";
    fs::create_directories(work);

    struct Criterion {
        int id;
        const char* name;
        double budget_s;  // 0: no runtime limit
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "LS recovery", 10.0, ls_recovery},
        {2, "BHT analytic-empirical agreement", 5.0, bht_rates},
        {3, "Q-function accuracy", 0.0, q_accuracy},
        {4, "SVM dual optimality", 30.0, svm_dual},
        {5, "Bayes consistency", 0.0, bayes_consistency},
        {6, "AUC closed form", 0.0, auc_closed_form},
        {7, "End-to-end pipeline", 60.0, [&] { return end_to_end(work); }},
        {8, "Heavy-tail ordering", 0.0, [&] { return heavy_tail_ordering(work); }},
        {9, "Determinism", 0.0, [&] { return determinism(work); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) v.require(false, "runtime " + num(secs, 3) + " s over " + num(c.budget_s, 3) + " s");
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << " (" << num(secs, 3) << " s): " << v.detail
                  << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
    return failed ? 1 : 0;
}
