#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dube/biaslab.hpp"
#include "dube/dataset.hpp"
#include "dube/ensemble.hpp"
#include "dube/metrics.hpp"
#include "dube/report.hpp"

namespace dube::experiment {

enum class Generator { Gaussian1d, Overlap2d };

/// Parameters of every command. Keys of the key=value config file use the
/// flag names without the leading dashes (e.g. `label-col = target`).
struct RunConfig {
    std::filesystem::path input;
    std::string label_col;  ///< name or zero-based index; empty = last column
    DubeConfig dube{};
    std::vector<double> alpha_grid;     ///< non-empty: tune alpha per fold on a validation split
    double validation_fraction = 0.2;
    std::size_t folds = 5;
    std::size_t repeats = 5;
    std::size_t threads = 1;
    std::filesystem::path out;
    ReportFormat format = ReportFormat::Csv;

    // noise-sweep
    std::vector<double> noise;

    // param-sweep
    std::string sweep = "alpha";  ///< alpha | bins
    std::vector<double> grid;
    std::vector<InterStrategy> sweep_inter;  ///< empty = the configured inter strategy
    bool select = false;

    // biaslab
    biaslab::ToyConfig toy{};
    std::vector<double> alpha_sigmas{0.0, 0.2};
    std::vector<std::size_t> bound_reps{1, 2, 4, 16};
    std::vector<double> bound_sigmas{0.1, 0.2, 0.5};
    std::size_t bound_trials = 100000;

    // synth
    Generator generator = Generator::Overlap2d;
    Overlap overlap = Overlap::Mid;

    /// Canonical key=value dump of everything that affects results.
    std::string canonical() const;
    /// FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;
};

/// Applies one key/value pair; throws std::invalid_argument on unknown keys
/// or malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key = value` lines; `#` starts a comment.
void apply_config_stream(RunConfig& cfg, std::istream& in);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Throws std::invalid_argument with a readable message.
void validate_cv(const RunConfig& cfg);

Dataset load_input(const RunConfig& cfg);

struct CellResult {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    double alpha = 0.0;  ///< alpha actually used (tuned or fixed)
    EvalReport eval;
    double resample_ms = 0.0;  ///< mean per resampling iteration
    std::size_t iterations = 0;
};

struct Summary {
    double f1_mean = 0.0, f1_std = 0.0;
    double mcc_mean = 0.0, mcc_std = 0.0;
    double auroc_mean = 0.0, auroc_std = 0.0;
    double resample_ms = 0.0;
};

Summary summarize(const std::vector<CellResult>& cells);

/// Instrumentation of one CV cell, called before fitting. Row ids refer to
/// the original dataset.
struct CellTrace {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    /// Rows of the dataset whose labels were altered before training.
    std::vector<std::size_t> noised_rows;
};

struct CvOptions {
    /// Optional transformation applied to each training fold only.
    std::function<Dataset(const Dataset& train, std::size_t repeat, std::size_t fold)> train_transform;
    std::function<void(const CellTrace&)> on_cell;
};

/// repeats x folds stratified cross-validation of the DuBE ensemble. Cells may
/// run on `cfg.threads` workers; results are ordered by (repeat, fold) and do
/// not depend on the thread count.
std::vector<CellResult> cross_validate(const Dataset& ds, const RunConfig& cfg, const CvOptions& options = {});

/// Picks alpha from `grid` by macro-AUROC on a stratified validation split of
/// `train` (ties go to the earlier grid value).
double tune_alpha(const Dataset& train, const DubeConfig& base, const std::vector<double>& grid,
                  double validation_fraction, std::uint64_t seed);

Report cmd_bench(const Dataset& ds, const RunConfig& cfg);
Report cmd_noise_sweep(const Dataset& ds, const RunConfig& cfg);
Report cmd_param_sweep(const Dataset& ds, const RunConfig& cfg);
Report cmd_biaslab(const RunConfig& cfg);
Dataset cmd_synth(const RunConfig& cfg);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

std::vector<double> parse_real_list(const std::string& s);

}  // namespace dube::experiment
