#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dube/dataset.hpp"
#include "dube/rng.hpp"

namespace dube {

/// Inter-class balancing: the common per-class size every class is resampled to.
enum class InterStrategy {
    RUS,  ///< under-sample to the smallest class
    ROS,  ///< over-sample to the largest class
    RHS,  ///< hybrid: every class to floor(N / m)
};

/// Intra-class balancing: how instances inside a class are weighted.
struct IntraStrategy {
    enum class Kind { Uniform, HEM, SHEM };

    Kind kind = Kind::SHEM;
    std::size_t bins = 5;  ///< SHEM histogram resolution
};

std::string to_string(InterStrategy s);
InterStrategy parse_inter_strategy(const std::string& s);
std::string to_string(IntraStrategy::Kind k);
IntraStrategy::Kind parse_intra_kind(const std::string& s);

/// Target per-class size. Requires at least two classes, all nonempty.
std::size_t target_class_size(std::span<const std::size_t> counts, InterStrategy strategy);

/// L1 distance between a probability vector and the one-hot encoding of `y`;
/// lies in [0, 2]. Throws on an invalid probability vector.
double prediction_error(std::span<const double> proba, ClassId y);

/// Maps an error in [0, 2] onto [0, 1].
double normalize_error(double error);

/// Density of normalised errors over `bins` equal-width bins covering [0, 1].
struct ErrorHistogram {
    std::size_t bins = 0;
    std::vector<double> density;

    /// Zero-based bin of an error in [0, 1]; 1.0 lands in the last bin.
    static std::size_t bin_of(double error, std::size_t bins) noexcept;
};

ErrorHistogram error_histogram(std::span<const double> errors, std::size_t bins);

/// Weight proportional to error; all-zero input falls back to uniform weights.
std::vector<double> hem_weights(std::span<const double> errors);

/// Inverse error density of each instance's bin, with the histogram built over
/// all of `errors`.
std::vector<double> shem_weights(std::span<const double> errors, std::size_t bins);

/// Per-class resampling target and instance weights.
struct SamplingPlan {
    std::size_t target = 0;
    /// weights[c][j] belongs to row ds.class_rows(c)[j]
    std::vector<std::vector<double>> weights;
};

/// Builds the plan for one ensemble iteration from normalised per-row errors
/// (`errors[i]` for row i of `ds`). The SHEM histogram is global; weights are
/// then used class by class. Classes whose weights are all zero get uniform
/// weights.
SamplingPlan make_sampling_plan(const Dataset& ds, std::span<const double> errors, InterStrategy inter,
                                const IntraStrategy& intra);

/// Draws `n` row ids from `rows` according to `weights`.
///
/// n <= |rows|: sequential weighted draws without replacement. Once every
/// positive-weight row has been taken, remaining draws are uniform over the
/// rows left. n > |rows|: every row once, followed by n - |rows| weighted
/// draws with replacement.
std::vector<std::size_t> weighted_resample(std::span<const std::size_t> rows, std::span<const double> weights,
                                           std::size_t n, Rng& rng);

}  // namespace dube
