#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dube/dataset.hpp"

namespace dube {

/// Fitted probabilistic classifier. Instances are immutable after fitting and
/// safe for concurrent prediction.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual std::size_t num_classes() const noexcept = 0;
    virtual std::size_t num_features() const noexcept = 0;

    /// Writes a length-m probability vector into `out`.
    /// Throws std::invalid_argument on dimension mismatch.
    virtual void predict_proba(std::span<const double> x, std::span<double> out) const = 0;

    std::vector<double> predict_proba(std::span<const double> x) const;

    /// Row-major N x m probabilities for every row of `ds`.
    virtual std::vector<double> predict_proba_all(const Dataset& ds) const;

    /// Versioned structured-text dump; read back with `load_classifier`.
    virtual void save(std::ostream& out) const = 0;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

ClassifierPtr load_classifier(std::istream& in);

enum class SplitCriterion { Gini, Entropy };

struct TreeParams {
    std::size_t max_depth = 0;  ///< 0 means unbounded
    std::size_t min_samples_leaf = 1;
    SplitCriterion criterion = SplitCriterion::Gini;
    /// Additive smoothing of leaf frequencies; 0 keeps raw frequencies.
    double laplace = 0.0;
};

/// Axis-aligned binary CART tree.
///
/// Splits are chosen greedily over midpoints of sorted distinct feature
/// values, minimising the weighted child impurity. Ties go to the lowest
/// feature index, then the lowest threshold. A node is split whenever it is
/// impure and a split respecting `min_samples_leaf` exists, even if the
/// impurity does not drop (XOR-like patterns need such splits).
class DecisionTree final : public Classifier {
public:
    struct Node {
        std::int32_t feature = -1;  ///< -1 marks a leaf
        double threshold = 0.0;     ///< x[feature] <= threshold goes left
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::size_t proba_offset = 0;
    };

    static DecisionTree fit(const Dataset& ds, const TreeParams& params, std::uint64_t seed = 0);

    std::size_t num_classes() const noexcept override { return classes_; }
    std::size_t num_features() const noexcept override { return features_; }
    using Classifier::predict_proba;
    void predict_proba(std::span<const double> x, std::span<double> out) const override;
    void save(std::ostream& out) const override;
    static DecisionTree load(std::istream& in);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t depth() const noexcept;
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

private:
    std::size_t classes_ = 0;
    std::size_t features_ = 0;
    std::vector<Node> nodes_;
    std::vector<double> leaf_proba_;
};

/// k-nearest-neighbour vote under Euclidean distance; distance ties go to the
/// lower training row index.
class KnnClassifier final : public Classifier {
public:
    static KnnClassifier fit(const Dataset& ds, std::size_t k_neighbors);

    std::size_t num_classes() const noexcept override { return classes_; }
    std::size_t num_features() const noexcept override { return features_; }
    std::size_t k() const noexcept { return k_; }
    using Classifier::predict_proba;
    void predict_proba(std::span<const double> x, std::span<double> out) const override;
    void save(std::ostream& out) const override;
    static KnnClassifier load(std::istream& in);

private:
    std::size_t classes_ = 0;
    std::size_t features_ = 0;
    std::size_t k_ = 1;
    std::vector<double> train_x_;
    std::vector<ClassId> train_y_;
};

enum class LearnerKind { Tree, Knn };

/// Which base learner to fit, with its hyperparameters.
struct LearnerSpec {
    LearnerKind kind = LearnerKind::Tree;
    TreeParams tree{};
    std::size_t knn_k = 5;

    ClassifierPtr fit(const Dataset& ds, std::uint64_t seed) const;
};

std::string to_string(LearnerKind kind);
LearnerKind parse_learner_kind(const std::string& s);
std::string to_string(SplitCriterion c);
SplitCriterion parse_split_criterion(const std::string& s);

}  // namespace dube
