#include "dube/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "dube/pbda.hpp"
#include "dube/rng.hpp"

namespace dube {

void DubeConfig::validate() const
{
    if (k == 0) {
        throw std::invalid_argument("ensemble size k must be >= 1");
    }
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("alpha must be >= 0");
    }
    if (intra.bins == 0) {
        throw std::invalid_argument("number of bins must be >= 1");
    }
    if (learner.kind == LearnerKind::Knn && learner.knn_k == 0) {
        throw std::invalid_argument("knn k must be >= 1");
    }
    if (learner.tree.min_samples_leaf == 0) {
        throw std::invalid_argument("min_samples_leaf must be >= 1");
    }
}

EnsembleModel::EnsembleModel(std::vector<ClassifierPtr> members, std::size_t num_classes,
                             std::size_t num_features, DubeConfig config)
    : members_(std::move(members)), classes_(num_classes), features_(num_features), config_(std::move(config))
{
    for (const auto& member : members_) {
        if (!member || member->num_classes() != classes_ || member->num_features() != features_) {
            throw std::invalid_argument("ensemble members must share class and feature counts");
        }
    }
}

void EnsembleModel::predict_proba(std::span<const double> x, std::span<double> out) const
{
    if (members_.empty()) {
        throw std::logic_error("ensemble has no members");
    }
    if (x.size() != features_) {
        throw std::invalid_argument("query has " + std::to_string(x.size()) + " features, model expects " +
                                    std::to_string(features_));
    }
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> buf(classes_);
    for (const auto& member : members_) {
        member->predict_proba(x, buf);
        for (std::size_t c = 0; c < classes_; ++c) {
            out[c] += buf[c];
        }
    }
    const auto n = static_cast<double>(members_.size());
    for (double& p : out) {
        p /= n;
    }
}

std::vector<double> EnsembleModel::predict_proba(std::span<const double> x) const
{
    std::vector<double> out(classes_);
    predict_proba(x, out);
    return out;
}

ClassId argmax_class(std::span<const double> proba)
{
    return static_cast<ClassId>(std::max_element(proba.begin(), proba.end()) - proba.begin());
}

ClassId EnsembleModel::predict(std::span<const double> x) const
{
    return argmax_class(predict_proba(x));
}

std::vector<double> EnsembleModel::predict_proba_all(const Dataset& ds, std::size_t threads) const
{
    const std::size_t n = ds.rows();
    const std::size_t m = classes_;
    std::vector<double> out(n * m);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            predict_proba(ds.row(i), std::span<double>(out.data() + i * m, m));
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        work(0, n);
        return out;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        pool.emplace_back(work, begin, std::min(n, begin + chunk));
    }
    pool.clear();
    return out;
}

void EnsembleModel::save(std::ostream& out) const
{
    char alpha[32];
    std::snprintf(alpha, sizeof alpha, "%.17g", config_.alpha);
    char laplace[32];
    std::snprintf(laplace, sizeof laplace, "%.17g", config_.learner.tree.laplace);
    out << "dube-ensemble 1\n";
    out << "shape " << classes_ << ' ' << features_ << '\n';
    out << "config " << config_.k << ' ' << to_string(config_.inter) << ' ' << to_string(config_.intra.kind) << ' '
        << config_.intra.bins << ' ' << alpha << ' ' << to_string(config_.learner.kind) << ' '
        << config_.learner.tree.max_depth << ' ' << config_.learner.tree.min_samples_leaf << ' '
        << to_string(config_.learner.tree.criterion) << ' ' << laplace << ' ' << config_.learner.knn_k << ' '
        << config_.seed << '\n';
    out << "members " << members_.size() << '\n';
    for (const auto& member : members_) {
        member->save(out);
    }
}

EnsembleModel EnsembleModel::load(std::istream& in)
{
    auto expect = [&](const std::string& want) {
        std::string got;
        if (!(in >> got) || got != want) {
            throw std::runtime_error("ensemble stream: expected '" + want + "'");
        }
    };
    auto read = [&](auto& value) {
        if (!(in >> value)) {
            throw std::runtime_error("ensemble stream: truncated or malformed");
        }
    };
    expect("dube-ensemble");
    int version = 0;
    read(version);
    if (version != 1) {
        throw std::runtime_error("unsupported ensemble format version " + std::to_string(version));
    }
    std::size_t classes = 0;
    std::size_t features = 0;
    expect("shape");
    read(classes);
    read(features);

    DubeConfig cfg;
    std::string inter;
    std::string intra;
    std::string learner;
    std::string criterion;
    expect("config");
    read(cfg.k);
    read(inter);
    read(intra);
    read(cfg.intra.bins);
    read(cfg.alpha);
    read(learner);
    read(cfg.learner.tree.max_depth);
    read(cfg.learner.tree.min_samples_leaf);
    read(criterion);
    read(cfg.learner.tree.laplace);
    read(cfg.learner.knn_k);
    read(cfg.seed);
    cfg.inter = parse_inter_strategy(inter);
    cfg.intra.kind = parse_intra_kind(intra);
    cfg.learner.kind = parse_learner_kind(learner);
    cfg.learner.tree.criterion = parse_split_criterion(criterion);

    std::size_t count = 0;
    expect("members");
    read(count);
    std::vector<ClassifierPtr> members;
    members.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        members.push_back(load_classifier(in));
    }
    return EnsembleModel(std::move(members), classes, features, cfg);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

constexpr std::uint64_t kResampleStream = 0;
constexpr std::uint64_t kAugmentStream = 1;
constexpr std::uint64_t kLearnerStream = 2;

}  // namespace

EnsembleModel dube_fit(const Dataset& ds, const DubeConfig& cfg, const FitOptions& options)
{
    cfg.validate();
    const std::size_t m = ds.num_classes();
    const std::size_t n = ds.rows();
    const std::size_t d = ds.dims();
    if (m < 2) {
        throw std::invalid_argument("dube_fit needs at least two classes");
    }
    const auto counts = class_counts(ds);
    if (std::find(counts.begin(), counts.end(), std::size_t{0}) != counts.end()) {
        throw std::invalid_argument("dube_fit: every class needs at least one training row");
    }

    const Rng root(cfg.seed);
    std::vector<ClassCovariance> covariances;
    covariances.reserve(m);
    for (std::size_t c = 0; c < m; ++c) {
        covariances.push_back(class_covariance(ds, static_cast<ClassId>(c)));
    }

    std::vector<ClassifierPtr> members;
    members.reserve(cfg.k);
    members.push_back(cfg.learner.fit(ds, root.derive_seed({1, kLearnerStream})));
    if (options.observer) {
        IterationTrace trace;
        trace.iteration = 1;
        trace.class_sizes = counts;
        trace.resampled_rows.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            trace.resampled_rows[i] = i;
        }
        options.observer(trace);
    }

    // Running sum of member probabilities on the training rows.
    std::vector<double> proba_sum;
    if (options.buffer_predictions && cfg.k > 1) {
        proba_sum = members.front()->predict_proba_all(ds);
    }

    std::vector<double> errors(n);
    std::vector<double> ensemble_proba(n * m);
    for (std::size_t t = 2; t <= cfg.k; ++t) {
        if (!options.buffer_predictions) {
            proba_sum.assign(n * m, 0.0);
            for (const auto& member : members) {
                const auto p = member->predict_proba_all(ds);
                for (std::size_t i = 0; i < p.size(); ++i) {
                    proba_sum[i] += p[i];
                }
            }
        }
        const auto n_members = static_cast<double>(t - 1);
        for (std::size_t i = 0; i < n * m; ++i) {
            ensemble_proba[i] = proba_sum[i] / n_members;
        }

        IterationTrace trace;
        trace.iteration = t;
        const auto resample_start = Clock::now();
        for (std::size_t i = 0; i < n; ++i) {
            errors[i] = normalize_error(
                prediction_error(std::span<const double>(ensemble_proba.data() + i * m, m), ds.label(i)));
        }
        const SamplingPlan plan = make_sampling_plan(ds, errors, cfg.inter, cfg.intra);
        std::vector<std::vector<std::size_t>> drawn(m);
        for (std::size_t c = 0; c < m; ++c) {
            Rng rng = root.derive({t, c, kResampleStream});
            drawn[c] = weighted_resample(ds.class_rows(static_cast<ClassId>(c)), plan.weights[c], plan.target, rng);
        }
        trace.resample_ms = elapsed_ms(resample_start);

        const auto augment_start = Clock::now();
        std::vector<double> features;
        std::vector<ClassId> labels;
        features.reserve(m * plan.target * d);
        labels.reserve(m * plan.target);
        for (std::size_t c = 0; c < m; ++c) {
            std::vector<double> block;
            block.reserve(drawn[c].size() * d);
            for (std::size_t r : drawn[c]) {
                auto x = ds.row(r);
                block.insert(block.end(), x.begin(), x.end());
            }
            Rng rng = root.derive({t, c, kAugmentStream});
            const auto augmented = perturb(block, cfg.alpha, covariances[c], rng);
            features.insert(features.end(), augmented.begin(), augmented.end());
            labels.insert(labels.end(), drawn[c].size(), static_cast<ClassId>(c));
        }
        trace.augment_ms = elapsed_ms(augment_start);
        Dataset resampled(std::move(features), d, std::move(labels), m, ds.class_names());

        members.push_back(cfg.learner.fit(resampled, root.derive_seed({t, kLearnerStream})));

        if (options.buffer_predictions && t < cfg.k) {
            const auto p = members.back()->predict_proba_all(ds);
            for (std::size_t i = 0; i < p.size(); ++i) {
                proba_sum[i] += p[i];
            }
        }

        if (options.observer) {
            trace.target = plan.target;
            for (const auto& rows : drawn) {
                trace.class_sizes.push_back(rows.size());
                trace.resampled_rows.insert(trace.resampled_rows.end(), rows.begin(), rows.end());
            }
            options.observer(trace);
        }
    }
    return EnsembleModel(std::move(members), m, d, cfg);
}

}  // namespace dube
