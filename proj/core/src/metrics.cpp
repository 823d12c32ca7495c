#include "dube/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dube {

std::size_t ConfusionMatrix::total() const
{
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

namespace {

std::size_t infer_classes(std::span<const ClassId> a, std::span<const ClassId> b, std::size_t given)
{
    if (given != 0) {
        return given;
    }
    ClassId top = 0;
    for (ClassId y : a) {
        top = std::max(top, y);
    }
    for (ClassId y : b) {
        top = std::max(top, y);
    }
    return std::max<std::size_t>(2, static_cast<std::size_t>(top) + 1);
}

std::vector<ClassScores> per_class_scores(const ConfusionMatrix& cm)
{
    std::vector<ClassScores> out(cm.classes);
    for (std::size_t c = 0; c < cm.classes; ++c) {
        double tp = static_cast<double>(cm.at(c, c));
        double predicted = 0.0;
        double actual = 0.0;
        for (std::size_t k = 0; k < cm.classes; ++k) {
            predicted += static_cast<double>(cm.at(k, c));
            actual += static_cast<double>(cm.at(c, k));
        }
        auto& s = out[c];
        s.precision = predicted > 0.0 ? tp / predicted : 0.0;
        s.recall = actual > 0.0 ? tp / actual : 0.0;
        const double denom = s.precision + s.recall;
        s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
    }
    return out;
}

double mcc_from_confusion(const ConfusionMatrix& cm)
{
    const std::size_t m = cm.classes;
    const double s = static_cast<double>(cm.total());
    double correct = 0.0;
    std::vector<double> pred(m, 0.0);
    std::vector<double> truth(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        correct += static_cast<double>(cm.at(i, i));
        for (std::size_t j = 0; j < m; ++j) {
            truth[i] += static_cast<double>(cm.at(i, j));
            pred[j] += static_cast<double>(cm.at(i, j));
        }
    }
    double pt = 0.0;
    double pp = 0.0;
    double tt = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        pt += pred[k] * truth[k];
        pp += pred[k] * pred[k];
        tt += truth[k] * truth[k];
    }
    const double denom = std::sqrt(s * s - pp) * std::sqrt(s * s - tt);
    if (!(denom > 0.0)) {
        return 0.0;
    }
    return (correct * s - pt) / denom;
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const ClassId> y_true, std::span<const ClassId> y_pred,
                                 std::size_t num_classes)
{
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("y_true and y_pred differ in length");
    }
    ConfusionMatrix cm{num_classes, std::vector<std::size_t>(num_classes * num_classes, 0)};
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] >= num_classes || y_pred[i] >= num_classes) {
            throw std::invalid_argument("label outside [0, m)");
        }
        ++cm.counts[y_true[i] * num_classes + y_pred[i]];
    }
    return cm;
}

double macro_f1(std::span<const ClassId> y_true, std::span<const ClassId> y_pred, std::size_t num_classes)
{
    const auto cm = confusion_matrix(y_true, y_pred, infer_classes(y_true, y_pred, num_classes));
    const auto scores = per_class_scores(cm);
    double sum = 0.0;
    for (const auto& s : scores) {
        sum += s.f1;
    }
    return sum / static_cast<double>(scores.size());
}

double mcc(std::span<const ClassId> y_true, std::span<const ClassId> y_pred, std::size_t num_classes)
{
    return mcc_from_confusion(confusion_matrix(y_true, y_pred, infer_classes(y_true, y_pred, num_classes)));
}

double binary_auroc(std::span<const ClassId> y_true, std::span<const double> scores, ClassId positive)
{
    const std::size_t n = y_true.size();
    if (scores.size() != n) {
        throw std::invalid_argument("labels and scores differ in length");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum = 0.0;
    double n_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) {
            ++j;
        }
        const double midrank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (y_true[order[k]] == positive) {
                rank_sum += midrank;
                n_pos += 1.0;
            }
        }
        i = j + 1;
    }
    const double n_neg = static_cast<double>(n) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0) {
        throw std::invalid_argument("AUROC undefined: class " + std::to_string(positive) +
                                    " is absent or covers every row");
    }
    return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double macro_auroc(std::span<const ClassId> y_true, std::span<const double> scores, std::size_t num_classes)
{
    const std::size_t n = y_true.size();
    if (num_classes < 2 || scores.size() != n * num_classes) {
        throw std::invalid_argument("scores must be an N x m matrix with m >= 2");
    }
    std::vector<double> column(n);
    double sum = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = scores[i * num_classes + c];
        }
        sum += binary_auroc(y_true, column, static_cast<ClassId>(c));
    }
    return sum / static_cast<double>(num_classes);
}

EvalReport evaluate(std::span<const ClassId> y_true, std::span<const double> proba, std::size_t num_classes)
{
    const std::size_t n = y_true.size();
    if (proba.size() != n * num_classes) {
        throw std::invalid_argument("probability matrix shape mismatch");
    }
    std::vector<ClassId> y_pred(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = proba.subspan(i * num_classes, num_classes);
        y_pred[i] = static_cast<ClassId>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    EvalReport report;
    report.confusion = confusion_matrix(y_true, y_pred, num_classes);
    report.per_class = per_class_scores(report.confusion);
    double f1 = 0.0;
    for (const auto& s : report.per_class) {
        f1 += s.f1;
    }
    report.macro_f1 = f1 / static_cast<double>(num_classes);
    report.mcc = mcc_from_confusion(report.confusion);
    report.macro_auroc = macro_auroc(y_true, proba, num_classes);
    return report;
}

}  // namespace dube
