#include "dube/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dube/rng.hpp"

namespace dube::experiment {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& text)
{
    const std::string s = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw std::invalid_argument(key + ": '" + text + "' is not a real number");
    }
    return v;
}

std::size_t parse_size(const std::string& key, const std::string& text)
{
    const std::string s = trim(text);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument(key + ": '" + text + "' is not a non-negative integer");
    }
    return v;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        return false;
    }
    throw std::invalid_argument(key + ": '" + text + "' is not a boolean");
}

std::string join_reals(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        out += (i ? "," : "");
        out += buf;
    }
    return out;
}

std::string real17(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Overlap parse_overlap(const std::string& s)
{
    if (s == "low") {
        return Overlap::Low;
    }
    if (s == "mid") {
        return Overlap::Mid;
    }
    if (s == "high") {
        return Overlap::High;
    }
    throw std::invalid_argument("unknown overlap level '" + s + "' (expected low|mid|high)");
}

std::string to_string(Overlap o)
{
    switch (o) {
    case Overlap::Low: return "low";
    case Overlap::Mid: return "mid";
    case Overlap::High: return "high";
    }
    return "?";
}

std::string to_string(Generator g)
{
    return g == Generator::Gaussian1d ? "gauss1d" : "overlap2d";
}

}  // namespace

std::vector<double> parse_real_list(const std::string& s)
{
    std::vector<double> out;
    for (const auto& item : split_list(s)) {
        out.push_back(parse_real("list", item));
    }
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value)
{
    const std::string key = trim(raw_key);
    const std::string v = trim(value);
    if (key == "input") {
        cfg.input = v;
    } else if (key == "label-col") {
        cfg.label_col = v;
    } else if (key == "k") {
        cfg.dube.k = parse_size(key, v);
    } else if (key == "inter") {
        cfg.dube.inter = parse_inter_strategy(v);
    } else if (key == "intra") {
        cfg.dube.intra.kind = parse_intra_kind(v);
    } else if (key == "bins") {
        cfg.dube.intra.bins = parse_size(key, v);
    } else if (key == "alpha") {
        cfg.dube.alpha = parse_real(key, v);
    } else if (key == "alpha-grid") {
        cfg.alpha_grid = parse_real_list(v);
    } else if (key == "validation-fraction") {
        cfg.validation_fraction = parse_real(key, v);
    } else if (key == "learner") {
        cfg.dube.learner.kind = parse_learner_kind(v);
    } else if (key == "max-depth") {
        cfg.dube.learner.tree.max_depth = parse_size(key, v);
    } else if (key == "min-samples-leaf" || key == "min-leaf") {
        cfg.dube.learner.tree.min_samples_leaf = parse_size(key, v);
    } else if (key == "criterion") {
        cfg.dube.learner.tree.criterion = parse_split_criterion(v);
    } else if (key == "laplace") {
        cfg.dube.learner.tree.laplace = parse_real(key, v);
    } else if (key == "knn-k") {
        cfg.dube.learner.knn_k = parse_size(key, v);
    } else if (key == "folds") {
        cfg.folds = parse_size(key, v);
    } else if (key == "repeats") {
        cfg.repeats = parse_size(key, v);
    } else if (key == "seed") {
        cfg.dube.seed = parse_size(key, v);
        cfg.toy.seed = cfg.dube.seed;
    } else if (key == "threads") {
        cfg.threads = parse_size(key, v);
    } else if (key == "out") {
        cfg.out = v;
    } else if (key == "format") {
        cfg.format = parse_report_format(v);
    } else if (key == "noise") {
        cfg.noise = parse_real_list(v);
    } else if (key == "sweep") {
        if (v != "alpha" && v != "bins") {
            throw std::invalid_argument("sweep: expected alpha|bins, got '" + v + "'");
        }
        cfg.sweep = v;
    } else if (key == "grid") {
        cfg.grid = parse_real_list(v);
    } else if (key == "sweep-inter") {
        cfg.sweep_inter.clear();
        for (const auto& item : split_list(v)) {
            cfg.sweep_inter.push_back(parse_inter_strategy(item));
        }
    } else if (key == "select") {
        cfg.select = parse_bool(key, v);
    } else if (key == "n-min") {
        cfg.toy.n_min = parse_size(key, v);
    } else if (key == "n-maj") {
        cfg.toy.n_maj = parse_size(key, v);
    } else if (key == "mu-min") {
        cfg.toy.mu_min = parse_real(key, v);
    } else if (key == "mu-maj") {
        cfg.toy.mu_maj = parse_real(key, v);
    } else if (key == "sigma") {
        cfg.toy.sigma = parse_real(key, v);
    } else if (key == "trials") {
        cfg.toy.trials = parse_size(key, v);
    } else if (key == "alpha-sigmas") {
        cfg.alpha_sigmas = parse_real_list(v);
    } else if (key == "bound-reps") {
        cfg.bound_reps.clear();
        for (const auto& item : split_list(v)) {
            cfg.bound_reps.push_back(parse_size(key, item));
        }
    } else if (key == "bound-sigmas") {
        cfg.bound_sigmas = parse_real_list(v);
    } else if (key == "bound-trials") {
        cfg.bound_trials = parse_size(key, v);
    } else if (key == "generator") {
        if (v == "gauss1d") {
            cfg.generator = Generator::Gaussian1d;
        } else if (v == "overlap2d") {
            cfg.generator = Generator::Overlap2d;
        } else {
            throw std::invalid_argument("generator: expected gauss1d|overlap2d, got '" + v + "'");
        }
    } else if (key == "overlap") {
        cfg.overlap = parse_overlap(v);
    } else {
        throw std::invalid_argument("unknown setting '" + key + "'");
    }
}

void apply_config_stream(RunConfig& cfg, std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path.string() + "'");
    }
    apply_config_stream(cfg, in);
}

std::string RunConfig::canonical() const
{
    std::ostringstream out;
    const auto& t = dube.learner.tree;
    out << "input=" << input.string() << '\n'
        << "label-col=" << label_col << '\n'
        << "k=" << dube.k << '\n'
        << "inter=" << to_string(dube.inter) << '\n'
        << "intra=" << to_string(dube.intra.kind) << '\n'
        << "bins=" << dube.intra.bins << '\n'
        << "alpha=" << real17(dube.alpha) << '\n'
        << "alpha-grid=" << join_reals(alpha_grid) << '\n'
        << "validation-fraction=" << real17(validation_fraction) << '\n'
        << "learner=" << to_string(dube.learner.kind) << '\n'
        << "max-depth=" << t.max_depth << '\n'
        << "min-samples-leaf=" << t.min_samples_leaf << '\n'
        << "criterion=" << to_string(t.criterion) << '\n'
        << "laplace=" << real17(t.laplace) << '\n'
        << "knn-k=" << dube.learner.knn_k << '\n'
        << "folds=" << folds << '\n'
        << "repeats=" << repeats << '\n'
        << "seed=" << dube.seed << '\n'
        << "noise=" << join_reals(noise) << '\n'
        << "sweep=" << sweep << '\n'
        << "grid=" << join_reals(grid) << '\n';
    out << "sweep-inter=";
    for (std::size_t i = 0; i < sweep_inter.size(); ++i) {
        out << (i ? "," : "") << to_string(sweep_inter[i]);
    }
    out << '\n'
        << "select=" << (select ? "true" : "false") << '\n'
        << "n-min=" << toy.n_min << '\n'
        << "n-maj=" << toy.n_maj << '\n'
        << "mu-min=" << real17(toy.mu_min) << '\n'
        << "mu-maj=" << real17(toy.mu_maj) << '\n'
        << "sigma=" << real17(toy.sigma) << '\n'
        << "trials=" << toy.trials << '\n'
        << "alpha-sigmas=" << join_reals(alpha_sigmas) << '\n';
    out << "bound-reps=";
    for (std::size_t i = 0; i < bound_reps.size(); ++i) {
        out << (i ? "," : "") << bound_reps[i];
    }
    out << '\n'
        << "bound-sigmas=" << join_reals(bound_sigmas) << '\n'
        << "bound-trials=" << bound_trials << '\n'
        << "generator=" << to_string(generator) << '\n'
        << "overlap=" << to_string(overlap) << '\n';
    return out.str();
}

std::string RunConfig::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void validate_cv(const RunConfig& cfg)
{
    if (cfg.folds < 2) {
        throw std::invalid_argument("folds must be >= 2");
    }
    if (cfg.repeats < 1) {
        throw std::invalid_argument("repeats must be >= 1");
    }
    if (cfg.threads < 1) {
        throw std::invalid_argument("threads must be >= 1");
    }
    if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
        throw std::invalid_argument("validation-fraction must lie in (0, 1)");
    }
    for (double a : cfg.alpha_grid) {
        if (!(a >= 0.0)) {
            throw std::invalid_argument("alpha-grid values must be >= 0");
        }
    }
    cfg.dube.validate();
}

Dataset load_input(const RunConfig& cfg)
{
    if (cfg.input.empty()) {
        throw std::invalid_argument("--input is required");
    }
    LabelColumn column;
    if (cfg.label_col.empty()) {
        // last column: count cells of the first line
        std::ifstream in(cfg.input);
        if (!in) {
            throw std::runtime_error("cannot open '" + cfg.input.string() + "'");
        }
        std::string first;
        std::getline(in, first);
        column = static_cast<std::size_t>(std::count(first.begin(), first.end(), ','));
    } else if (std::all_of(cfg.label_col.begin(), cfg.label_col.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        column = parse_size("label-col", cfg.label_col);
    } else {
        column = cfg.label_col;
    }
    return load_csv(cfg.input, column);
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn)
{
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

namespace {

constexpr std::uint64_t kFoldStream = 100;
constexpr std::uint64_t kCellStream = 200;
constexpr std::uint64_t kTuneStream = 300;

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean)
{
    double s = 0.0;
    for (double x : v) {
        s += (x - mean) * (x - mean);
    }
    return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

double tune_alpha(const Dataset& train, const DubeConfig& base, const std::vector<double>& grid,
                  double validation_fraction, std::uint64_t seed)
{
    if (grid.empty()) {
        return base.alpha;
    }
    if (grid.size() == 1) {
        return grid.front();
    }
    auto [fit_rows, val_rows] = stratified_holdout(train, validation_fraction, seed);
    const Dataset fit_part = train.subset(fit_rows);
    const Dataset val_part = train.subset(val_rows);
    double best_alpha = grid.front();
    double best_score = -1.0;
    for (double alpha : grid) {
        DubeConfig cfg = base;
        cfg.alpha = alpha;
        const auto model = dube_fit(fit_part, cfg);
        const auto proba = model.predict_proba_all(val_part);
        const double score = macro_auroc(val_part.labels(), proba, val_part.num_classes());
        if (score > best_score) {
            best_score = score;
            best_alpha = alpha;
        }
    }
    return best_alpha;
}

std::vector<CellResult> cross_validate(const Dataset& ds, const RunConfig& cfg, const CvOptions& options)
{
    validate_cv(cfg);
    const Rng root(cfg.dube.seed);
    std::vector<FoldPlan> plans;
    plans.reserve(cfg.repeats);
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        plans.push_back(stratified_k_fold(ds, cfg.folds, root.derive_seed({kFoldStream, r})));
    }

    const std::size_t n_cells = cfg.repeats * cfg.folds;
    std::vector<CellResult> results(n_cells);
    std::mutex trace_mutex;
    auto run_cell = [&](std::size_t cell) {
        const std::size_t r = cell / cfg.folds;
        const std::size_t f = cell % cfg.folds;
        const auto train_rows = plans[r].train_rows(f);
        const auto test_rows = plans[r].test_rows(f);
        Dataset train = ds.subset(train_rows);
        const Dataset test = ds.subset(test_rows);
        if (options.train_transform) {
            Dataset transformed = options.train_transform(train, r, f);
            if (options.on_cell) {
                CellTrace trace{r, f, train_rows, test_rows, {}};
                for (std::size_t i = 0; i < train.rows(); ++i) {
                    if (transformed.label(i) != train.label(i)) {
                        trace.noised_rows.push_back(train_rows[i]);
                    }
                }
                std::lock_guard lock(trace_mutex);
                options.on_cell(trace);
            }
            train = std::move(transformed);
        } else if (options.on_cell) {
            std::lock_guard lock(trace_mutex);
            options.on_cell(CellTrace{r, f, train_rows, test_rows, {}});
        }

        DubeConfig dcfg = cfg.dube;
        dcfg.seed = root.derive_seed({kCellStream, r, f});
        if (!cfg.alpha_grid.empty()) {
            dcfg.alpha = tune_alpha(train, dcfg, cfg.alpha_grid, cfg.validation_fraction,
                                    root.derive_seed({kTuneStream, r, f}));
        }

        CellResult& out = results[cell];
        out.repeat = r;
        out.fold = f;
        out.alpha = dcfg.alpha;
        double resample_total = 0.0;
        FitOptions fit_options;
        fit_options.observer = [&](const IterationTrace& trace) {
            if (trace.iteration > 1) {
                resample_total += trace.resample_ms;
                ++out.iterations;
            }
        };
        const auto model = dube_fit(train, dcfg, fit_options);
        const auto proba = model.predict_proba_all(test);
        out.eval = evaluate(test.labels(), proba, test.num_classes());
        out.resample_ms = out.iterations ? resample_total / static_cast<double>(out.iterations) : 0.0;
    };
    std::vector<std::string> failures(n_cells);
    parallel_for(n_cells, cfg.threads, [&](std::size_t cell) {
        try {
            run_cell(cell);
        } catch (const std::exception& e) {
            failures[cell] = e.what();
        }
    });
    std::string failed;
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        if (!failures[cell].empty()) {
            failed += "\n  repeat " + std::to_string(cell / cfg.folds) + " fold " + std::to_string(cell % cfg.folds) +
                      ": " + failures[cell];
        }
    }
    if (!failed.empty()) {
        throw std::runtime_error("cross-validation cells failed:" + failed);
    }
    return results;
}

Summary summarize(const std::vector<CellResult>& cells)
{
    std::vector<double> f1;
    std::vector<double> mcc_v;
    std::vector<double> auroc;
    std::vector<double> ms;
    for (const auto& c : cells) {
        f1.push_back(c.eval.macro_f1);
        mcc_v.push_back(c.eval.mcc);
        auroc.push_back(c.eval.macro_auroc);
        ms.push_back(c.resample_ms);
    }
    Summary s;
    s.f1_mean = mean_of(f1);
    s.f1_std = std_of(f1, s.f1_mean);
    s.mcc_mean = mean_of(mcc_v);
    s.mcc_std = std_of(mcc_v, s.mcc_mean);
    s.auroc_mean = mean_of(auroc);
    s.auroc_std = std_of(auroc, s.auroc_mean);
    s.resample_ms = mean_of(ms);
    return s;
}

namespace {

void add_dataset_meta(Report& report, const Dataset& ds, const RunConfig& cfg)
{
    report.meta.emplace_back("rng", std::string(Rng::algorithm));
    report.meta.emplace_back("config_hash", cfg.hash());
    report.meta.emplace_back("input", cfg.input.string());
    report.meta.emplace_back("rows", std::to_string(ds.rows()));
    report.meta.emplace_back("dims", std::to_string(ds.dims()));
    std::string classes;
    const auto counts = class_counts(ds);
    for (std::size_t c = 0; c < ds.num_classes(); ++c) {
        classes += (c ? ";" : "") + std::to_string(c) + "=" + ds.class_names()[c] + "(" +
                   std::to_string(counts[c]) + ")";
    }
    report.meta.emplace_back("classes", classes);
    report.meta.emplace_back("ensemble", "k=" + std::to_string(cfg.dube.k) + " inter=" + to_string(cfg.dube.inter) +
                                             " intra=" + to_string(cfg.dube.intra.kind) +
                                             " bins=" + std::to_string(cfg.dube.intra.bins) +
                                             " learner=" + to_string(cfg.dube.learner.kind));
    report.meta.emplace_back("alpha", cfg.alpha_grid.empty() ? real17(cfg.dube.alpha)
                                                             : "auto over {" + join_reals(cfg.alpha_grid) + "}");
    report.meta.emplace_back("cv", std::to_string(cfg.repeats) + "x" + std::to_string(cfg.folds) +
                                       " stratified, seed=" + std::to_string(cfg.dube.seed));
}

std::vector<std::string> summary_cells(const Summary& s)
{
    return {format_real(s.f1_mean), format_real(s.f1_std),   format_real(s.mcc_mean),
            format_real(s.mcc_std), format_real(s.auroc_mean), format_real(s.auroc_std)};
}

const std::vector<std::string> kSummaryColumns = {"macro_f1_mean", "macro_f1_std", "mcc_mean",
                                                  "mcc_std",       "macro_auroc_mean", "macro_auroc_std"};

}  // namespace

Report cmd_bench(const Dataset& ds, const RunConfig& cfg)
{
    const auto cells = cross_validate(ds, cfg);
    Report report;
    report.command = "bench";
    add_dataset_meta(report, ds, cfg);

    auto& table = report.table("cells");
    table.columns = {"repeat", "fold", "alpha", "macro_f1", "mcc", "macro_auroc"};
    for (const auto& c : cells) {
        table.add_row({std::to_string(c.repeat), std::to_string(c.fold), format_real(c.alpha, 3),
                       format_real(c.eval.macro_f1), format_real(c.eval.mcc), format_real(c.eval.macro_auroc)});
    }
    const Summary s = summarize(cells);
    auto& summary = report.table("summary");
    summary.columns = {"metric", "mean", "std"};
    summary.add_row({"macro_f1", format_real(s.f1_mean), format_real(s.f1_std)});
    summary.add_row({"mcc", format_real(s.mcc_mean), format_real(s.mcc_std)});
    summary.add_row({"macro_auroc", format_real(s.auroc_mean), format_real(s.auroc_std)});
    report.timing.emplace_back("resample_ms_per_iter", format_real(s.resample_ms, 4));
    return report;
}

Report cmd_noise_sweep(const Dataset& ds, const RunConfig& cfg)
{
    if (cfg.noise.empty()) {
        throw std::invalid_argument("noise-sweep needs a non-empty --noise list");
    }
    if (ds.num_classes() != 2) {
        throw std::invalid_argument("noise-sweep requires a binary dataset");
    }
    for (double r : cfg.noise) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw std::invalid_argument("noise ratios must lie in [0, 1]");
        }
    }
    Report report;
    report.command = "noise-sweep";
    add_dataset_meta(report, ds, cfg);
    auto& table = report.table("noise");
    table.columns = {"noise", "intra"};
    table.columns.insert(table.columns.end(), kSummaryColumns.begin(), kSummaryColumns.end());

    const Rng root(cfg.dube.seed);
    const IntraStrategy::Kind kinds[] = {IntraStrategy::Kind::Uniform, IntraStrategy::Kind::HEM,
                                         IntraStrategy::Kind::SHEM};
    for (std::size_t ri = 0; ri < cfg.noise.size(); ++ri) {
        const double ratio = cfg.noise[ri];
        CvOptions options;
        // same corrupted training folds for every strategy at this ratio
        options.train_transform = [&](const Dataset& train, std::size_t r, std::size_t f) {
            return inject_flip_noise(train, ratio, root.derive_seed({400, ri, r, f}));
        };
        for (auto kind : kinds) {
            RunConfig run = cfg;
            run.dube.intra.kind = kind;
            const Summary s = summarize(cross_validate(ds, run, options));
            std::vector<std::string> row{format_real(ratio, 3), to_string(kind)};
            const auto cells = summary_cells(s);
            row.insert(row.end(), cells.begin(), cells.end());
            table.add_row(std::move(row));
            report.timing.emplace_back("resample_ms[" + format_real(ratio, 2) + "," + to_string(kind) + "]",
                                       format_real(s.resample_ms, 4));
        }
    }
    return report;
}

Report cmd_param_sweep(const Dataset& ds, const RunConfig& cfg)
{
    if (cfg.grid.empty()) {
        throw std::invalid_argument("param-sweep needs a non-empty --grid");
    }
    Report report;
    report.command = "param-sweep";
    add_dataset_meta(report, ds, cfg);
    report.meta.emplace_back("sweep", cfg.sweep);
    auto& table = report.table("sweep");
    table.columns = {"param", "value", "inter", "intra", "bins", "alpha"};
    table.columns.insert(table.columns.end(), kSummaryColumns.begin(), kSummaryColumns.end());

    auto emit = [&](const RunConfig& run, const std::string& value, const std::string& alpha) {
        const Summary s = summarize(cross_validate(ds, run));
        std::vector<std::string> row{cfg.sweep, value, to_string(run.dube.inter), to_string(run.dube.intra.kind),
                                     std::to_string(run.dube.intra.bins), alpha};
        const auto cells = summary_cells(s);
        row.insert(row.end(), cells.begin(), cells.end());
        table.add_row(std::move(row));
    };

    if (cfg.sweep == "alpha") {
        const std::vector<InterStrategy> inters =
            cfg.sweep_inter.empty() ? std::vector<InterStrategy>{cfg.dube.inter} : cfg.sweep_inter;
        for (InterStrategy inter : inters) {
            for (double alpha : cfg.grid) {
                if (!(alpha >= 0.0)) {
                    throw std::invalid_argument("alpha grid values must be >= 0");
                }
                RunConfig run = cfg;
                run.alpha_grid.clear();
                run.dube.inter = inter;
                run.dube.alpha = alpha;
                emit(run, format_real(alpha, 3), format_real(alpha, 3));
            }
            if (cfg.select && cfg.grid.size() > 1) {
                RunConfig run = cfg;
                run.dube.inter = inter;
                run.alpha_grid = cfg.grid;
                emit(run, "selected", "auto");
            }
        }
    } else {
        for (double b : cfg.grid) {
            if (!(b >= 1.0) || b != std::floor(b)) {
                throw std::invalid_argument("bins grid values must be positive integers");
            }
            RunConfig run = cfg;
            run.dube.intra.kind = IntraStrategy::Kind::SHEM;
            run.dube.intra.bins = static_cast<std::size_t>(b);
            emit(run, std::to_string(run.dube.intra.bins),
                 run.alpha_grid.empty() ? format_real(run.dube.alpha, 3) : "auto");
        }
    }
    return report;
}

Report cmd_biaslab(const RunConfig& cfg)
{
    cfg.toy.validate();
    if (cfg.alpha_sigmas.empty()) {
        throw std::invalid_argument("biaslab needs at least one alpha-sigma value");
    }
    Report report;
    report.command = "biaslab";
    report.meta.emplace_back("rng", std::string(Rng::algorithm));
    report.meta.emplace_back("config_hash", cfg.hash());
    const auto& t = cfg.toy;
    report.meta.emplace_back("toy", "n_min=" + std::to_string(t.n_min) + " n_maj=" + std::to_string(t.n_maj) +
                                        " mu_min=" + real17(t.mu_min) + " mu_maj=" + real17(t.mu_maj) +
                                        " sigma=" + real17(t.sigma) + " seed=" + std::to_string(t.seed));
    report.meta.emplace_back("optimal_boundary", real17(t.optimal_boundary()));

    auto& bias = report.table("bias");
    bias.columns = {"strategy", "alpha", "mean_bias", "var_bias", "trials"};
    for (double a : cfg.alpha_sigmas) {
        for (auto strategy : biaslab::kAllStrategies) {
            const auto r = biaslab::run_bias_trials(t, strategy, a, cfg.threads);
            bias.add_row({biaslab::to_string(strategy), format_real(a, 3), format_real(r.mean_bias),
                          format_real(r.var_bias), std::to_string(r.trials)});
        }
    }

    auto& bound = report.table("bound");
    bound.columns = {"n_rep", "sigma_p", "empirical", "lower", "upper", "trials"};
    for (std::size_t n_rep : cfg.bound_reps) {
        for (double sp : cfg.bound_sigmas) {
            const auto b = biaslab::check_pbda_bound(n_rep, sp, cfg.bound_trials, t.seed);
            bound.add_row({std::to_string(n_rep), format_real(sp, 3), format_real(b.empirical),
                           format_real(b.lower), format_real(b.upper), std::to_string(cfg.bound_trials)});
        }
    }
    return report;
}

Dataset cmd_synth(const RunConfig& cfg)
{
    const auto& t = cfg.toy;
    if (cfg.generator == Generator::Gaussian1d) {
        return make_gaussian_1d(t.n_min, t.n_maj, t.mu_min, t.mu_maj, t.sigma, cfg.dube.seed);
    }
    return make_overlap_2d(t.n_min, t.n_maj, cfg.overlap, cfg.dube.seed);
}

}  // namespace dube::experiment
