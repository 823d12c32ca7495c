#include "dube/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dube {

std::string to_string(InterStrategy s)
{
    switch (s) {
    case InterStrategy::RUS: return "rus";
    case InterStrategy::ROS: return "ros";
    case InterStrategy::RHS: return "rhs";
    }
    return "?";
}

InterStrategy parse_inter_strategy(const std::string& s)
{
    if (s == "rus") {
        return InterStrategy::RUS;
    }
    if (s == "ros") {
        return InterStrategy::ROS;
    }
    if (s == "rhs") {
        return InterStrategy::RHS;
    }
    throw std::invalid_argument("unknown inter-class strategy '" + s + "' (expected rus|ros|rhs)");
}

std::string to_string(IntraStrategy::Kind k)
{
    switch (k) {
    case IntraStrategy::Kind::Uniform: return "uniform";
    case IntraStrategy::Kind::HEM: return "hem";
    case IntraStrategy::Kind::SHEM: return "shem";
    }
    return "?";
}

IntraStrategy::Kind parse_intra_kind(const std::string& s)
{
    if (s == "uniform") {
        return IntraStrategy::Kind::Uniform;
    }
    if (s == "hem") {
        return IntraStrategy::Kind::HEM;
    }
    if (s == "shem") {
        return IntraStrategy::Kind::SHEM;
    }
    throw std::invalid_argument("unknown intra-class strategy '" + s + "' (expected uniform|hem|shem)");
}

std::size_t target_class_size(std::span<const std::size_t> counts, InterStrategy strategy)
{
    if (counts.size() < 2) {
        throw std::invalid_argument("target_class_size needs at least two classes");
    }
    if (std::find(counts.begin(), counts.end(), std::size_t{0}) != counts.end()) {
        throw std::invalid_argument("target_class_size: every class must be nonempty");
    }
    switch (strategy) {
    case InterStrategy::RUS: return *std::min_element(counts.begin(), counts.end());
    case InterStrategy::ROS: return *std::max_element(counts.begin(), counts.end());
    case InterStrategy::RHS:
        return std::accumulate(counts.begin(), counts.end(), std::size_t{0}) / counts.size();
    }
    throw std::logic_error("unknown inter-class strategy");
}

double prediction_error(std::span<const double> proba, ClassId y)
{
    if (y >= proba.size()) {
        throw std::invalid_argument("label outside the probability vector");
    }
    double sum = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i < proba.size(); ++i) {
        const double p = proba[i];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("probability component outside [0, 1]");
        }
        sum += p;
        err += std::abs(p - (i == y ? 1.0 : 0.0));
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw std::invalid_argument("probability vector does not sum to 1");
    }
    return std::min(err, 2.0);
}

double normalize_error(double error)
{
    if (!(error >= 0.0 && error <= 2.0)) {
        throw std::invalid_argument("prediction error outside [0, 2]");
    }
    return error / 2.0;
}

std::size_t ErrorHistogram::bin_of(double error, std::size_t bins) noexcept
{
    const auto raw = static_cast<std::size_t>(std::floor(error * static_cast<double>(bins)));
    return std::min(raw, bins - 1);
}

ErrorHistogram error_histogram(std::span<const double> errors, std::size_t bins)
{
    if (bins == 0) {
        throw std::invalid_argument("histogram needs at least one bin");
    }
    if (errors.empty()) {
        throw std::invalid_argument("histogram of an empty error list");
    }
    std::vector<std::size_t> counts(bins, 0);
    for (double e : errors) {
        if (!(e >= 0.0 && e <= 1.0)) {
            throw std::invalid_argument("normalised error outside [0, 1]");
        }
        ++counts[ErrorHistogram::bin_of(e, bins)];
    }
    ErrorHistogram hist{bins, std::vector<double>(bins)};
    const auto total = static_cast<double>(errors.size());
    for (std::size_t i = 0; i < bins; ++i) {
        hist.density[i] = static_cast<double>(counts[i]) / total;
    }
    return hist;
}

std::vector<double> hem_weights(std::span<const double> errors)
{
    if (errors.empty()) {
        throw std::invalid_argument("hem_weights of an empty error list");
    }
    bool any_positive = false;
    for (double e : errors) {
        if (!(e >= 0.0)) {
            throw std::invalid_argument("negative prediction error");
        }
        any_positive = any_positive || e > 0.0;
    }
    if (!any_positive) {
        return std::vector<double>(errors.size(), 1.0);
    }
    return {errors.begin(), errors.end()};
}

std::vector<double> shem_weights(std::span<const double> errors, std::size_t bins)
{
    const auto hist = error_histogram(errors, bins);
    std::vector<double> weights;
    weights.reserve(errors.size());
    for (double e : errors) {
        weights.push_back(1.0 / hist.density[ErrorHistogram::bin_of(e, bins)]);
    }
    return weights;
}

SamplingPlan make_sampling_plan(const Dataset& ds, std::span<const double> errors, InterStrategy inter,
                                const IntraStrategy& intra)
{
    if (errors.size() != ds.rows()) {
        throw std::invalid_argument("one error per dataset row required");
    }
    const auto counts = class_counts(ds);
    SamplingPlan plan;
    plan.target = target_class_size(counts, inter);

    std::vector<double> row_weights;
    switch (intra.kind) {
    case IntraStrategy::Kind::Uniform: row_weights.assign(ds.rows(), 1.0); break;
    case IntraStrategy::Kind::HEM: row_weights = hem_weights(errors); break;
    case IntraStrategy::Kind::SHEM: row_weights = shem_weights(errors, intra.bins); break;
    }

    plan.weights.resize(ds.num_classes());
    for (std::size_t c = 0; c < ds.num_classes(); ++c) {
        const auto& rows = ds.class_rows(static_cast<ClassId>(c));
        auto& w = plan.weights[c];
        w.reserve(rows.size());
        double sum = 0.0;
        for (std::size_t r : rows) {
            w.push_back(row_weights[r]);
            sum += row_weights[r];
        }
        if (!(sum > 0.0)) {
            std::fill(w.begin(), w.end(), 1.0);
        }
    }
    return plan;
}

namespace {

/// Fenwick tree over nonnegative weights supporting point updates and
/// "smallest index whose prefix sum exceeds t" queries.
class WeightTree {
public:
    explicit WeightTree(std::span<const double> weights) : tree_(weights.size() + 1, 0.0)
    {
        for (std::size_t i = 0; i < weights.size(); ++i) {
            tree_[i + 1] += weights[i];
            const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
            if (parent < tree_.size()) {
                tree_[parent] += tree_[i + 1];
            }
        }
        std::size_t top = 1;
        while (top * 2 < tree_.size()) {
            top *= 2;
        }
        top_ = top;
    }

    void add(std::size_t i, double delta)
    {
        for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) {
            tree_[k] += delta;
        }
    }

    double total() const
    {
        double sum = 0.0;
        for (std::size_t k = tree_.size() - 1; k > 0; k -= k & (~k + 1)) {
            sum += tree_[k];
        }
        return sum;
    }

    std::size_t find(double t) const
    {
        std::size_t pos = 0;
        for (std::size_t step = top_; step > 0; step /= 2) {
            const std::size_t next = pos + step;
            if (next < tree_.size() && tree_[next] <= t) {
                t -= tree_[next];
                pos = next;
            }
        }
        return pos;  // zero-based index of the selected item
    }

private:
    std::vector<double> tree_;
    std::size_t top_ = 1;
};

}  // namespace

std::vector<std::size_t> weighted_resample(std::span<const std::size_t> rows, std::span<const double> weights,
                                           std::size_t n, Rng& rng)
{
    if (rows.size() != weights.size()) {
        throw std::invalid_argument("weighted_resample: rows and weights differ in length");
    }
    if (rows.empty()) {
        throw std::invalid_argument("weighted_resample: no rows to draw from");
    }
    std::size_t positive = 0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("weighted_resample: weights must be finite and nonnegative");
        }
        positive += w > 0.0 ? 1 : 0;
    }
    if (positive == 0) {
        throw std::invalid_argument("weighted_resample: all weights are zero");
    }

    std::vector<std::size_t> out;
    out.reserve(n);
    const std::size_t size = rows.size();

    if (n <= size) {
        WeightTree tree(weights);
        std::vector<double> live(weights.begin(), weights.end());
        std::vector<char> taken(size, 0);
        std::vector<std::size_t> zero_pool;
        for (std::size_t draw = 0; draw < n; ++draw) {
            if (positive == 0) {
                if (zero_pool.empty()) {
                    for (std::size_t i = 0; i < size; ++i) {
                        if (!taken[i]) {
                            zero_pool.push_back(i);
                        }
                    }
                }
                const std::size_t k = rng.index(zero_pool.size());
                out.push_back(rows[zero_pool[k]]);
                zero_pool[k] = zero_pool.back();
                zero_pool.pop_back();
                continue;
            }
            std::size_t pick = tree.find(rng.uniform() * tree.total());
            if (pick >= size || live[pick] <= 0.0) {
                // rounding drift in the prefix sums: settle on the nearest live item
                pick = std::min(pick, size - 1);
                std::size_t probe = pick;
                while (live[probe] <= 0.0) {
                    probe = probe == 0 ? size - 1 : probe - 1;
                }
                pick = probe;
            }
            out.push_back(rows[pick]);
            tree.add(pick, -live[pick]);
            live[pick] = 0.0;
            taken[pick] = 1;
            --positive;
        }
        return out;
    }

    out.assign(rows.begin(), rows.end());
    std::vector<double> cumulative(size);
    std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
    const double total = cumulative.back();
    for (std::size_t draw = size; draw < n; ++draw) {
        const double t = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), t);
        auto pick = static_cast<std::size_t>(it - cumulative.begin());
        pick = std::min(pick, size - 1);
        while (weights[pick] <= 0.0) {
            pick = pick == 0 ? size - 1 : pick - 1;
        }
        out.push_back(rows[pick]);
    }
    return out;
}

}  // namespace dube
