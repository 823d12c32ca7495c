#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dube/dataset.hpp"

namespace dube {

/// m x m counts, row = true class, column = predicted class.
struct ConfusionMatrix {
    std::size_t classes = 0;
    std::vector<std::size_t> counts;

    std::size_t at(std::size_t truth, std::size_t pred) const { return counts[truth * classes + pred]; }
    std::size_t total() const;
};

ConfusionMatrix confusion_matrix(std::span<const ClassId> y_true, std::span<const ClassId> y_pred,
                                 std::size_t num_classes);

/// Unweighted mean of per-class F1; a class with precision + recall == 0
/// contributes 0. `num_classes` == 0 infers m from the largest label.
double macro_f1(std::span<const ClassId> y_true, std::span<const ClassId> y_pred, std::size_t num_classes = 0);

/// Multiclass Matthews correlation (Gorodkin's R_K); 0 when the denominator vanishes.
double mcc(std::span<const ClassId> y_true, std::span<const ClassId> y_pred, std::size_t num_classes = 0);

/// One-vs-rest AUROC of one score column via the Mann-Whitney rank statistic
/// with midranks for ties. Throws if `positive` is absent or universal.
double binary_auroc(std::span<const ClassId> y_true, std::span<const double> scores, ClassId positive);

/// Macro mean of one-vs-rest AUROC. `scores` is row-major N x m.
double macro_auroc(std::span<const ClassId> y_true, std::span<const double> scores, std::size_t num_classes);

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    double macro_f1 = 0.0;
    double mcc = 0.0;
    double macro_auroc = 0.0;
    std::vector<ClassScores> per_class;
    ConfusionMatrix confusion;
};

/// Full report from true labels and row-major N x m probabilities; predictions
/// are the argmax with lowest-id tie-breaking.
EvalReport evaluate(std::span<const ClassId> y_true, std::span<const double> proba, std::size_t num_classes);

}  // namespace dube
