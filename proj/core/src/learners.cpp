#include "dube/learners.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace dube {

std::vector<double> Classifier::predict_proba(std::span<const double> x) const
{
    std::vector<double> out(num_classes());
    predict_proba(x, out);
    return out;
}

std::vector<double> Classifier::predict_proba_all(const Dataset& ds) const
{
    const std::size_t m = num_classes();
    std::vector<double> out(ds.rows() * m);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        predict_proba(ds.row(i), std::span<double>(out.data() + i * m, m));
    }
    return out;
}

namespace {

void check_query(std::span<const double> x, std::span<double> out, std::size_t d, std::size_t m)
{
    if (x.size() != d) {
        throw std::invalid_argument("query has " + std::to_string(x.size()) + " features, model expects " +
                                    std::to_string(d));
    }
    if (out.size() != m) {
        throw std::invalid_argument("output buffer has wrong class count");
    }
}

void write_real(std::ostream& out, double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

void expect_token(std::istream& in, const std::string& want)
{
    std::string got;
    if (!(in >> got) || got != want) {
        throw std::runtime_error("model stream: expected '" + want + "', got '" + got + "'");
    }
}

template <class T>
T read_value(std::istream& in)
{
    T v{};
    if (!(in >> v)) {
        throw std::runtime_error("model stream: truncated or malformed");
    }
    return v;
}

double impurity(std::span<const double> counts, double total, SplitCriterion criterion)
{
    if (total <= 0.0) {
        return 0.0;
    }
    double acc = 0.0;
    if (criterion == SplitCriterion::Gini) {
        for (double c : counts) {
            const double p = c / total;
            acc += p * p;
        }
        return 1.0 - acc;
    }
    for (double c : counts) {
        if (c > 0.0) {
            const double p = c / total;
            acc -= p * std::log2(p);
        }
    }
    return acc;
}

class TreeBuilder {
public:
    TreeBuilder(const Dataset& ds, const TreeParams& params,
                std::vector<DecisionTree::Node>& nodes, std::vector<double>& leaf_proba)
        : ds_(ds), params_(params), nodes_(nodes), leaf_proba_(leaf_proba), m_(ds.num_classes())
    {
    }

    std::int32_t build(std::vector<std::size_t>& rows, std::size_t depth)
    {
        std::vector<double> counts(m_, 0.0);
        for (std::size_t r : rows) {
            counts[ds_.label(r)] += 1.0;
        }
        const auto node_id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();

        const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
        const bool depth_reached = params_.max_depth != 0 && depth >= params_.max_depth;
        Split split;
        if (!pure && !depth_reached && rows.size() >= 2 * params_.min_samples_leaf) {
            split = best_split(rows);
        }
        if (split.feature < 0) {
            make_leaf(node_id, counts);
            return node_id;
        }

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (std::size_t r : rows) {
            (ds_.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        const auto l = build(left, depth + 1);
        const auto rt = build(right, depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(node_id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = rt;
        return node_id;
    }

private:
    struct Split {
        std::int32_t feature = -1;
        double threshold = 0.0;
        double score = std::numeric_limits<double>::infinity();
    };

    void make_leaf(std::int32_t node_id, const std::vector<double>& counts)
    {
        auto& node = nodes_[static_cast<std::size_t>(node_id)];
        node.proba_offset = leaf_proba_.size();
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0) +
                             params_.laplace * static_cast<double>(m_);
        for (double c : counts) {
            leaf_proba_.push_back(total > 0.0 ? (c + params_.laplace) / total : 1.0 / static_cast<double>(m_));
        }
    }

    Split best_split(const std::vector<std::size_t>& rows)
    {
        Split best;
        const std::size_t n = rows.size();
        const std::size_t min_leaf = params_.min_samples_leaf;
        std::vector<std::size_t> order(rows);
        std::vector<double> left(m_);
        std::vector<double> right(m_);
        std::vector<double> total(m_, 0.0);
        for (std::size_t r : rows) {
            total[ds_.label(r)] += 1.0;
        }
        for (std::size_t f = 0; f < ds_.dims(); ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = ds_.at(a, f);
                const double vb = ds_.at(b, f);
                return va < vb || (va == vb && a < b);
            });
            std::fill(left.begin(), left.end(), 0.0);
            right = total;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const ClassId y = ds_.label(order[i]);
                left[y] += 1.0;
                right[y] -= 1.0;
                const double v = ds_.at(order[i], f);
                const double next = ds_.at(order[i + 1], f);
                if (v == next) {
                    continue;
                }
                const std::size_t n_left = i + 1;
                const std::size_t n_right = n - n_left;
                if (n_left < min_leaf || n_right < min_leaf) {
                    continue;
                }
                const double nl = static_cast<double>(n_left);
                const double nr = static_cast<double>(n_right);
                const double score = nl * impurity(left, nl, params_.criterion) +
                                     nr * impurity(right, nr, params_.criterion);
                if (score < best.score) {
                    best.score = score;
                    best.feature = static_cast<std::int32_t>(f);
                    double mid = v + (next - v) / 2.0;
                    // guard against the midpoint rounding onto the upper value
                    if (!(mid < next)) {
                        mid = v;
                    }
                    best.threshold = mid;
                }
            }
        }
        return best;
    }

    const Dataset& ds_;
    const TreeParams& params_;
    std::vector<DecisionTree::Node>& nodes_;
    std::vector<double>& leaf_proba_;
    std::size_t m_;
};

}  // namespace

DecisionTree DecisionTree::fit(const Dataset& ds, const TreeParams& params, std::uint64_t /*seed*/)
{
    if (ds.empty()) {
        throw std::invalid_argument("cannot fit a tree on an empty dataset");
    }
    if (params.min_samples_leaf < 1) {
        throw std::invalid_argument("min_samples_leaf must be >= 1");
    }
    if (params.laplace < 0.0) {
        throw std::invalid_argument("laplace smoothing must be >= 0");
    }
    DecisionTree tree;
    tree.classes_ = ds.num_classes();
    tree.features_ = ds.dims();
    std::vector<std::size_t> rows(ds.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    TreeBuilder builder(ds, params, tree.nodes_, tree.leaf_proba_);
    builder.build(rows, 0);
    return tree;
}

void DecisionTree::predict_proba(std::span<const double> x, std::span<double> out) const
{
    check_query(x, out, features_, classes_);
    std::size_t id = 0;
    while (nodes_[id].feature >= 0) {
        const auto& node = nodes_[id];
        id = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                  : node.right);
    }
    const double* p = leaf_proba_.data() + nodes_[id].proba_offset;
    std::copy(p, p + classes_, out.begin());
}

std::size_t DecisionTree::depth() const noexcept
{
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t deepest = 0;
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (nodes_[id].feature >= 0) {
            stack.emplace_back(static_cast<std::size_t>(nodes_[id].left), d + 1);
            stack.emplace_back(static_cast<std::size_t>(nodes_[id].right), d + 1);
        }
    }
    return deepest;
}

void DecisionTree::save(std::ostream& out) const
{
    out << "tree 1 " << classes_ << ' ' << features_ << ' ' << nodes_.size() << '\n';
    for (const auto& node : nodes_) {
        if (node.feature < 0) {
            out << "L";
            for (std::size_t c = 0; c < classes_; ++c) {
                out << ' ';
                write_real(out, leaf_proba_[node.proba_offset + c]);
            }
        } else {
            out << "S " << node.feature << ' ';
            write_real(out, node.threshold);
            out << ' ' << node.left << ' ' << node.right;
        }
        out << '\n';
    }
}

DecisionTree DecisionTree::load(std::istream& in)
{
    // "tree" token already consumed by the caller
    if (read_value<int>(in) != 1) {
        throw std::runtime_error("unsupported tree format version");
    }
    DecisionTree tree;
    tree.classes_ = read_value<std::size_t>(in);
    tree.features_ = read_value<std::size_t>(in);
    const auto n = read_value<std::size_t>(in);
    tree.nodes_.resize(n);
    for (auto& node : tree.nodes_) {
        const auto kind = read_value<std::string>(in);
        if (kind == "L") {
            node.proba_offset = tree.leaf_proba_.size();
            for (std::size_t c = 0; c < tree.classes_; ++c) {
                tree.leaf_proba_.push_back(read_value<double>(in));
            }
        } else if (kind == "S") {
            node.feature = read_value<std::int32_t>(in);
            node.threshold = read_value<double>(in);
            node.left = read_value<std::int32_t>(in);
            node.right = read_value<std::int32_t>(in);
            if (node.left < 0 || node.right < 0 || static_cast<std::size_t>(node.left) >= n ||
                static_cast<std::size_t>(node.right) >= n ||
                static_cast<std::size_t>(node.feature) >= tree.features_) {
                throw std::runtime_error("tree stream: node reference out of range");
            }
        } else {
            throw std::runtime_error("tree stream: unknown node kind '" + kind + "'");
        }
    }
    if (tree.nodes_.empty()) {
        throw std::runtime_error("tree stream: no nodes");
    }
    return tree;
}

KnnClassifier KnnClassifier::fit(const Dataset& ds, std::size_t k_neighbors)
{
    if (k_neighbors == 0) {
        throw std::invalid_argument("k_neighbors must be positive");
    }
    if (k_neighbors > ds.rows()) {
        throw std::invalid_argument("k_neighbors (" + std::to_string(k_neighbors) + ") exceeds training size (" +
                                    std::to_string(ds.rows()) + ")");
    }
    KnnClassifier knn;
    knn.classes_ = ds.num_classes();
    knn.features_ = ds.dims();
    knn.k_ = k_neighbors;
    knn.train_x_ = ds.features();
    knn.train_y_ = ds.labels();
    return knn;
}

void KnnClassifier::predict_proba(std::span<const double> x, std::span<double> out) const
{
    check_query(x, out, features_, classes_);
    const std::size_t n = train_y_.size();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = train_x_.data() + i * features_;
        double acc = 0.0;
        for (std::size_t j = 0; j < features_; ++j) {
            const double diff = row[j] - x[j];
            acc += diff * diff;
        }
        dist[i] = {acc, i};
    }
    // pair ordering breaks distance ties by row index
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_ - 1), dist.end());
    std::fill(out.begin(), out.end(), 0.0);
    const auto kth = dist[k_ - 1];
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i] <= kth) {
            out[train_y_[dist[i].second]] += 1.0;
        }
    }
    for (double& p : out) {
        p /= static_cast<double>(k_);
    }
}

void KnnClassifier::save(std::ostream& out) const
{
    out << "knn 1 " << classes_ << ' ' << features_ << ' ' << k_ << ' ' << train_y_.size() << '\n';
    for (std::size_t i = 0; i < train_y_.size(); ++i) {
        out << train_y_[i];
        for (std::size_t j = 0; j < features_; ++j) {
            out << ' ';
            write_real(out, train_x_[i * features_ + j]);
        }
        out << '\n';
    }
}

KnnClassifier KnnClassifier::load(std::istream& in)
{
    if (read_value<int>(in) != 1) {
        throw std::runtime_error("unsupported knn format version");
    }
    KnnClassifier knn;
    knn.classes_ = read_value<std::size_t>(in);
    knn.features_ = read_value<std::size_t>(in);
    knn.k_ = read_value<std::size_t>(in);
    const auto n = read_value<std::size_t>(in);
    if (knn.k_ == 0 || knn.k_ > n) {
        throw std::runtime_error("knn stream: invalid k");
    }
    knn.train_y_.reserve(n);
    knn.train_x_.reserve(n * knn.features_);
    for (std::size_t i = 0; i < n; ++i) {
        const auto y = read_value<ClassId>(in);
        if (y >= knn.classes_) {
            throw std::runtime_error("knn stream: label out of range");
        }
        knn.train_y_.push_back(y);
        for (std::size_t j = 0; j < knn.features_; ++j) {
            knn.train_x_.push_back(read_value<double>(in));
        }
    }
    return knn;
}

ClassifierPtr load_classifier(std::istream& in)
{
    const auto kind = read_value<std::string>(in);
    if (kind == "tree") {
        return std::make_shared<const DecisionTree>(DecisionTree::load(in));
    }
    if (kind == "knn") {
        return std::make_shared<const KnnClassifier>(KnnClassifier::load(in));
    }
    throw std::runtime_error("unknown classifier kind '" + kind + "'");
}

ClassifierPtr LearnerSpec::fit(const Dataset& ds, std::uint64_t seed) const
{
    switch (kind) {
    case LearnerKind::Tree: return std::make_shared<const DecisionTree>(DecisionTree::fit(ds, tree, seed));
    case LearnerKind::Knn: return std::make_shared<const KnnClassifier>(KnnClassifier::fit(ds, knn_k));
    }
    throw std::logic_error("unknown learner kind");
}

std::string to_string(LearnerKind kind)
{
    return kind == LearnerKind::Tree ? "tree" : "knn";
}

LearnerKind parse_learner_kind(const std::string& s)
{
    if (s == "tree") {
        return LearnerKind::Tree;
    }
    if (s == "knn") {
        return LearnerKind::Knn;
    }
    throw std::invalid_argument("unknown learner '" + s + "' (expected tree|knn)");
}

std::string to_string(SplitCriterion c)
{
    return c == SplitCriterion::Gini ? "gini" : "entropy";
}

SplitCriterion parse_split_criterion(const std::string& s)
{
    if (s == "gini") {
        return SplitCriterion::Gini;
    }
    if (s == "entropy") {
        return SplitCriterion::Entropy;
    }
    throw std::invalid_argument("unknown split criterion '" + s + "' (expected gini|entropy)");
}

}  // namespace dube
