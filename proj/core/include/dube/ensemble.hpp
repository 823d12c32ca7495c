#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "dube/balancing.hpp"
#include "dube/dataset.hpp"
#include "dube/learners.hpp"

namespace dube {

struct DubeConfig {
    std::size_t k = 10;
    InterStrategy inter = InterStrategy::RHS;
    IntraStrategy intra{};
    double alpha = 0.0;
    LearnerSpec learner{};
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on k == 0, alpha < 0 or bins == 0.
    void validate() const;
};

/// Soft-voting ensemble of fitted base learners.
class EnsembleModel {
public:
    EnsembleModel() = default;
    EnsembleModel(std::vector<ClassifierPtr> members, std::size_t num_classes, std::size_t num_features,
                  DubeConfig config);

    std::size_t size() const noexcept { return members_.size(); }
    std::size_t num_classes() const noexcept { return classes_; }
    std::size_t num_features() const noexcept { return features_; }
    const DubeConfig& config() const noexcept { return config_; }
    const std::vector<ClassifierPtr>& members() const noexcept { return members_; }

    /// Mean of the member probability vectors.
    std::vector<double> predict_proba(std::span<const double> x) const;
    void predict_proba(std::span<const double> x, std::span<double> out) const;

    /// Argmax of predict_proba; ties go to the lowest class id.
    ClassId predict(std::span<const double> x) const;

    /// Row-major N x m probabilities. `threads` > 1 splits rows across workers;
    /// the result is identical to the serial one.
    std::vector<double> predict_proba_all(const Dataset& ds, std::size_t threads = 1) const;

    void save(std::ostream& out) const;
    static EnsembleModel load(std::istream& in);

private:
    std::vector<ClassifierPtr> members_;
    std::size_t classes_ = 0;
    std::size_t features_ = 0;
    DubeConfig config_{};
};

/// Per-iteration trace emitted by the trainer.
struct IterationTrace {
    std::size_t iteration = 0;  ///< 1-based member index
    std::size_t target = 0;     ///< per-class resample size (0 for the first member)
    std::vector<std::size_t> class_sizes;  ///< resampled size of each class
    std::vector<std::size_t> resampled_rows;  ///< row ids of D drawn this iteration
    double resample_ms = 0.0;  ///< weight computation + per-class draw
    double augment_ms = 0.0;
};

struct FitOptions {
    /// Cache each member's predictions on the training set so that every
    /// member predicts on it exactly once. Disabling recomputes the running
    /// ensemble from scratch every iteration (same result, slower).
    bool buffer_predictions = true;
    std::function<void(const IterationTrace&)> observer;
};

/// Duple-balanced ensemble training.
///
/// The first member is fit on the raw, imbalanced data. Every later member
/// t is fit on a resample where each class has the inter-class target size,
/// instances are drawn according to intra-class weights computed from the
/// errors of the running ensemble F_{t-1} on the full training set, and each
/// class is perturbed with Gaussian noise calibrated by its covariance.
EnsembleModel dube_fit(const Dataset& ds, const DubeConfig& cfg, const FitOptions& options = {});

/// Applies argmax with lowest-id tie-breaking to a probability vector.
ClassId argmax_class(std::span<const double> proba);

}  // namespace dube
