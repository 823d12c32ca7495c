#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dube {

using ClassId = std::uint32_t;

/// Dense N x d feature table with integer class labels in [0, m).
///
/// Values are validated on construction (finite features, labels below m)
/// and the per-class row index is built once; a Dataset is immutable
/// afterwards and may be shared freely between threads.
class Dataset {
public:
    Dataset() = default;

    /// `features` is row-major with `dims` columns. `class_names` may be empty,
    /// in which case classes are named "0", "1", ...
    Dataset(std::vector<double> features, std::size_t dims, std::vector<ClassId> labels,
            std::size_t num_classes, std::vector<std::string> class_names = {});

    std::size_t rows() const noexcept { return labels_.size(); }
    std::size_t dims() const noexcept { return dims_; }
    std::size_t num_classes() const noexcept { return class_index_.size(); }
    bool empty() const noexcept { return labels_.empty(); }

    std::span<const double> row(std::size_t i) const noexcept
    {
        return {features_.data() + i * dims_, dims_};
    }
    double at(std::size_t i, std::size_t j) const noexcept { return features_[i * dims_ + j]; }
    ClassId label(std::size_t i) const noexcept { return labels_[i]; }

    const std::vector<double>& features() const noexcept { return features_; }
    const std::vector<ClassId>& labels() const noexcept { return labels_; }
    const std::vector<std::vector<std::size_t>>& class_index() const noexcept { return class_index_; }
    const std::vector<std::size_t>& class_rows(ClassId c) const { return class_index_.at(c); }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    /// Rows in the given order; class ids and names are kept.
    Dataset subset(std::span<const std::size_t> rows) const;

    /// Same features, new labels (validated against the current class count).
    Dataset relabeled(std::vector<ClassId> labels) const;

private:
    std::vector<double> features_;
    std::size_t dims_ = 0;
    std::vector<ClassId> labels_;
    std::vector<std::vector<std::size_t>> class_index_;
    std::vector<std::string> class_names_;
};

/// Label column selector: a header name or a zero-based column index.
using LabelColumn = std::variant<std::string, std::size_t>;

/// Reads a comma-separated file. The first line is treated as a header when
/// any of its cells does not parse as a real number. Class ids follow the
/// first-appearance order of distinct label strings.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column);
Dataset read_csv(std::istream& in, const LabelColumn& label_column);

/// Writes features as x0..x{d-1} followed by a `label` column of class names.
void write_csv(std::ostream& out, const Dataset& ds);

std::vector<std::size_t> class_counts(const Dataset& ds);

/// Smallest class (lowest id on ties).
ClassId minority_class(const Dataset& ds);
ClassId majority_class(const Dataset& ds);

struct FoldPlan {
    std::size_t k_folds = 0;
    std::vector<std::size_t> assignments;

    std::vector<std::size_t> test_rows(std::size_t fold) const;
    std::vector<std::size_t> train_rows(std::size_t fold) const;
};

/// Per class: rows shuffled with the seeded generator, then dealt round-robin.
/// Throws std::invalid_argument when k < 2 or a class has fewer than k rows.
FoldPlan stratified_k_fold(const Dataset& ds, std::size_t k, std::uint64_t seed);

/// Stratified hold-out: roughly `fraction` of each class (at least one row
/// when the class has two or more) goes to the second vector.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
stratified_holdout(const Dataset& ds, double fraction, std::uint64_t seed);

/// Symmetric label flips for binary data: floor(r * n_minority) minority rows
/// get the majority label and the same number of majority rows get the
/// minority label. Class counts are preserved.
Dataset inject_flip_noise(const Dataset& ds, double ratio, std::uint64_t seed);

/// 1-D two-class Gaussian sample. Majority rows (class 0, "negative") come
/// first, then minority rows (class 1, "positive").
Dataset make_gaussian_1d(std::size_t n_min, std::size_t n_maj, double mu_min, double mu_maj,
                         double sigma, std::uint64_t seed);

enum class Overlap { Low, Mid, High };

/// Separation between nearest component means in units of sigma.
double overlap_separation(Overlap level) noexcept;

/// 2-D Gaussian-blob mixture with unit isotropic variance: majority (class 0)
/// components at (0,0) and (0,2s), minority (class 1) components at (s,0) and
/// (s,2s), where s = overlap_separation(level). Each row picks a component of
/// its class uniformly at random.
Dataset make_overlap_2d(std::size_t n_min, std::size_t n_maj, Overlap level, std::uint64_t seed);

}  // namespace dube
