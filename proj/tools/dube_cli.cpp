// dube: command-line front end for the DuBE ensemble and its experiments.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dube/experiment.hpp"

namespace ex = dube::experiment;

namespace {

// Flag values are kept as strings and applied on top of the config file, so
// both sources go through the same validation.
struct FlagSet {
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> options;

    void add(CLI::App& app, const std::string& key, const std::string& help,
             const std::vector<std::string>& choices = {})
    {
        auto* opt = app.add_option("--" + key, values[key], help);
        if (!choices.empty()) {
            opt->check(CLI::IsMember(choices));
        }
        options.emplace_back(key, opt);
    }

    void apply(ex::RunConfig& cfg) const
    {
        for (const auto& [key, opt] : options) {
            if (opt->count() > 0) {
                ex::apply_setting(cfg, key, values.at(key));
            }
        }
    }
};

void add_common(CLI::App& app, FlagSet& flags)
{
    flags.add(app, "seed", "root seed (default 0)");
    flags.add(app, "threads", "worker threads (default 1)");
    flags.add(app, "out", "write the report here instead of stdout");
    flags.add(app, "format", "report format", {"csv", "text"});
}

void add_ensemble(CLI::App& app, FlagSet& flags)
{
    flags.add(app, "input", "CSV dataset");
    flags.add(app, "label-col", "label column: zero-based index or header name (default: last)");
    flags.add(app, "k", "ensemble size (default 10)");
    flags.add(app, "inter", "inter-class balancing", {"rus", "ros", "rhs"});
    flags.add(app, "intra", "intra-class balancing", {"uniform", "hem", "shem"});
    flags.add(app, "bins", "SHEM histogram bins (default 5)");
    flags.add(app, "alpha", "perturbation intensity (default 0)");
    flags.add(app, "alpha-grid", "comma list; tune alpha per fold on a 20% validation split");
    flags.add(app, "validation-fraction", "validation share used by --alpha-grid (default 0.2)");
    flags.add(app, "learner", "base learner", {"tree", "knn"});
    flags.add(app, "max-depth", "tree depth limit, 0 = unbounded");
    flags.add(app, "min-leaf", "tree minimum samples per leaf");
    flags.add(app, "criterion", "tree split criterion", {"gini", "entropy"});
    flags.add(app, "knn-k", "neighbours for the knn learner (default 5)");
    flags.add(app, "folds", "stratified CV folds (default 5)");
    flags.add(app, "repeats", "CV repetitions (default 5)");
    add_common(app, flags);
}

void add_toy(CLI::App& app, FlagSet& flags)
{
    flags.add(app, "n-min", "minority size (default 3)");
    flags.add(app, "n-maj", "majority size (default 15)");
    flags.add(app, "mu-min", "minority mean (default -2)");
    flags.add(app, "mu-maj", "majority mean (default 2)");
    flags.add(app, "sigma", "class standard deviation (default 1)");
}

void write_output(const ex::RunConfig& cfg, const std::string& text)
{
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out);
    if (!out) {
        throw std::runtime_error("cannot write '" + cfg.out.string() + "'");
    }
    out << text;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"DuBE: duple-balanced ensemble for imbalanced classification"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key = value config file; flags override it");

    FlagSet bench_flags;
    auto* bench = app.add_subcommand("bench", "repeated stratified CV of one configuration");
    bench->add_option("--config", config_path, "key = value config file; flags override it");
    add_ensemble(*bench, bench_flags);

    FlagSet noise_flags;
    auto* noise = app.add_subcommand("noise-sweep", "label-noise robustness of uniform/HEM/SHEM");
    noise->add_option("--config", config_path, "key = value config file; flags override it");
    add_ensemble(*noise, noise_flags);
    noise_flags.add(*noise, "noise", "comma list of flip ratios, e.g. 0,0.1,0.2");

    FlagSet sweep_flags;
    auto* sweep = app.add_subcommand("param-sweep", "sweep alpha or the SHEM bin count");
    sweep->add_option("--config", config_path, "key = value config file; flags override it");
    add_ensemble(*sweep, sweep_flags);
    sweep_flags.add(*sweep, "sweep", "parameter to sweep", {"alpha", "bins"});
    sweep_flags.add(*sweep, "grid", "comma list of values");
    sweep_flags.add(*sweep, "sweep-inter", "comma list of inter strategies for an alpha sweep");
    sweep_flags.add(*sweep, "select", "also report the per-fold auto-selected alpha", {"true", "false"});

    FlagSet bias_flags;
    auto* bias = app.add_subcommand("biaslab", "1-D resampling bias study");
    bias->add_option("--config", config_path, "key = value config file; flags override it");
    add_toy(*bias, bias_flags);
    bias_flags.add(*bias, "trials", "trials per strategy (default 10000)");
    bias_flags.add(*bias, "alpha-sigmas", "comma list of perturbation sigmas (default 0,0.2)");
    bias_flags.add(*bias, "bound-reps", "comma list of replication counts (default 1,2,4,16)");
    bias_flags.add(*bias, "bound-sigmas", "comma list of perturbation sigmas (default 0.1,0.2,0.5)");
    bias_flags.add(*bias, "bound-trials", "draws per bound check (default 100000)");
    add_common(*bias, bias_flags);

    FlagSet synth_flags;
    auto* synth = app.add_subcommand("synth", "write a synthetic dataset as CSV");
    synth_flags.add(*synth, "generator", "generator", {"gauss1d", "overlap2d"});
    synth_flags.add(*synth, "overlap", "overlap2d class overlap", {"low", "mid", "high"});
    add_toy(*synth, synth_flags);
    synth_flags.add(*synth, "seed", "seed (default 0)");
    synth_flags.add(*synth, "out", "write here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        ex::RunConfig cfg;
        if (!config_path.empty()) {
            ex::apply_config_file(cfg, config_path);
        }
        if (*synth) {
            synth_flags.apply(cfg);
            std::ostringstream out;
            dube::write_csv(out, ex::cmd_synth(cfg));
            write_output(cfg, out.str());
            return 0;
        }

        dube::Report report;
        if (*bias) {
            bias_flags.apply(cfg);
            report = ex::cmd_biaslab(cfg);
        } else {
            FlagSet& flags = *bench ? bench_flags : *noise ? noise_flags : sweep_flags;
            flags.apply(cfg);
            ex::validate_cv(cfg);
            const dube::Dataset ds = ex::load_input(cfg);
            report = *bench ? ex::cmd_bench(ds, cfg) : *noise ? ex::cmd_noise_sweep(ds, cfg) : ex::cmd_param_sweep(ds, cfg);
        }
        write_output(cfg, report.render(cfg.format));
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "dube: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "dube: error: " << e.what() << '\n';
        return 1;
    }
}
