#include "dube/biaslab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "dube/balancing.hpp"
#include "dube/dataset.hpp"

namespace dube::biaslab {

void ToyConfig::validate() const
{
    if (n_min == 0 || n_maj == 0) {
        throw std::invalid_argument("toy config: class sizes must be positive");
    }
    if (!(mu_maj > mu_min)) {
        throw std::invalid_argument("toy config: mu_maj must exceed mu_min");
    }
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("toy config: sigma must be positive");
    }
    if (trials == 0) {
        throw std::invalid_argument("toy config: trials must be positive");
    }
}

std::string to_string(Strategy s)
{
    switch (s) {
    case Strategy::None: return "none";
    case Strategy::RUS: return "rus";
    case Strategy::ROS: return "ros";
    case Strategy::SMOTE1D: return "smote1d";
    case Strategy::RHS: return "rhs";
    }
    return "?";
}

Strategy parse_strategy(const std::string& s)
{
    for (Strategy st : kAllStrategies) {
        if (to_string(st) == s) {
            return st;
        }
    }
    throw std::invalid_argument("unknown bias-lab strategy '" + s + "'");
}

double max_margin_1d(std::span<const double> positives, std::span<const double> negatives)
{
    if (positives.empty() || negatives.empty()) {
        throw std::invalid_argument("max_margin_1d needs both classes");
    }
    const double sup_pos = *std::max_element(positives.begin(), positives.end());
    const double sup_neg = *std::min_element(negatives.begin(), negatives.end());
    return (sup_pos + sup_neg) / 2.0;
}

double max_margin_1d(std::span<const double> xs, std::span<const int> ys)
{
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("max_margin_1d: xs and ys differ in length");
    }
    std::vector<double> pos;
    std::vector<double> neg;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        (ys[i] == 1 ? pos : neg).push_back(xs[i]);
    }
    return max_margin_1d(pos, neg);
}

double d_max(std::span<const double> points, double mu)
{
    if (points.empty()) {
        throw std::invalid_argument("d_max of an empty sample");
    }
    double best = 0.0;
    for (double x : points) {
        best = std::max(best, std::abs(x - mu));
    }
    return best;
}

std::vector<double> smote_1d(std::span<const double> points, std::size_t k_neighbors, std::size_t n_new, Rng& rng)
{
    const std::size_t n = points.size();
    if (n < 2) {
        throw std::invalid_argument("smote_1d needs at least two points");
    }
    if (k_neighbors == 0 || k_neighbors >= n) {
        throw std::invalid_argument("smote_1d needs 1 <= k_neighbors < number of points");
    }
    // neighbour lists: k closest other points, ties by lower index
    std::vector<std::vector<std::size_t>> neighbors(n);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                dist.emplace_back(std::abs(points[j] - points[i]), j);
            }
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_neighbors), dist.end());
        for (std::size_t k = 0; k < k_neighbors; ++k) {
            neighbors[i].push_back(dist[k].second);
        }
    }
    std::vector<double> out;
    out.reserve(n_new);
    for (std::size_t s = 0; s < n_new; ++s) {
        const std::size_t seed = rng.index(n);
        const std::size_t nb = neighbors[seed][rng.index(k_neighbors)];
        const double u = rng.uniform();
        out.push_back(points[seed] + u * (points[nb] - points[seed]));
    }
    return out;
}

namespace {

std::vector<double> pick(std::span<const double> values, std::span<const std::size_t> idx)
{
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(values[i]);
    }
    return out;
}

std::vector<double> resample_uniform(std::span<const double> values, std::size_t n, Rng rng)
{
    std::vector<std::size_t> rows(values.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = i;
    }
    const std::vector<double> weights(values.size(), 1.0);
    return pick(values, weighted_resample(rows, weights, n, rng));
}

}  // namespace

double bias_trial(const ToyConfig& cfg, Strategy strategy, double alpha_sigma, std::size_t trial)
{
    const Rng root = Rng(cfg.seed).derive({trial});
    const Dataset ds = make_gaussian_1d(cfg.n_min, cfg.n_maj, cfg.mu_min, cfg.mu_maj, cfg.sigma, root.derive_seed({0}));
    std::vector<double> positives;
    std::vector<double> negatives;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        (ds.label(i) == 1 ? positives : negatives).push_back(ds.at(i, 0));
    }

    const std::size_t counts[] = {negatives.size(), positives.size()};
    switch (strategy) {
    case Strategy::None: break;
    case Strategy::RUS:
    case Strategy::ROS:
    case Strategy::RHS: {
        const InterStrategy inter = strategy == Strategy::RUS   ? InterStrategy::RUS
                                    : strategy == Strategy::ROS ? InterStrategy::ROS
                                                                : InterStrategy::RHS;
        const std::size_t n = target_class_size(counts, inter);
        negatives = resample_uniform(negatives, n, root.derive({1, 0}));
        positives = resample_uniform(positives, n, root.derive({1, 1}));
        break;
    }
    case Strategy::SMOTE1D: {
        const std::size_t n = target_class_size(counts, InterStrategy::ROS);
        negatives = resample_uniform(negatives, n, root.derive({1, 0}));
        Rng rng = root.derive({1, 1});
        const std::size_t k = std::min<std::size_t>(5, positives.size() - 1);
        const auto synthetic = smote_1d(positives, k, n - positives.size(), rng);
        positives.insert(positives.end(), synthetic.begin(), synthetic.end());
        break;
    }
    }

    if (alpha_sigma > 0.0) {
        Rng rng = root.derive({2});
        for (double& x : positives) {
            x += alpha_sigma * rng.normal();
        }
        for (double& x : negatives) {
            x += alpha_sigma * rng.normal();
        }
    }
    return max_margin_1d(positives, negatives) - cfg.optimal_boundary();
}

BiasTrialReport run_bias_trials(const ToyConfig& cfg, Strategy strategy, double alpha_sigma, std::size_t threads)
{
    cfg.validate();
    if (!(alpha_sigma >= 0.0)) {
        throw std::invalid_argument("alpha_sigma must be >= 0");
    }
    std::vector<double> signed_bias(cfg.trials);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            signed_bias[i] = bias_trial(cfg, strategy, alpha_sigma, i);
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, cfg.trials));
    if (threads == 1) {
        work(0, cfg.trials);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (cfg.trials + threads - 1) / threads;
        for (std::size_t begin = 0; begin < cfg.trials; begin += chunk) {
            pool.emplace_back(work, begin, std::min(cfg.trials, begin + chunk));
        }
    }

    // aggregate in trial order so the result does not depend on scheduling
    BiasTrialReport report;
    report.strategy = strategy;
    report.alpha_sigma = alpha_sigma;
    report.trials = cfg.trials;
    const auto n = static_cast<double>(cfg.trials);
    double sum_abs = 0.0;
    double sum_signed = 0.0;
    for (double b : signed_bias) {
        sum_abs += std::abs(b);
        sum_signed += b;
    }
    report.mean_bias = sum_abs / n;
    report.mean_signed = sum_signed / n;
    double ss = 0.0;
    for (double b : signed_bias) {
        const double dev = std::abs(b) - report.mean_bias;
        ss += dev * dev;
    }
    report.var_bias = ss / n;
    return report;
}

BoundCheck check_pbda_bound(std::size_t n_rep, double sigma_p, std::size_t trials, std::uint64_t seed)
{
    if (n_rep == 0) {
        throw std::invalid_argument("n_rep must be >= 1");
    }
    if (!(sigma_p > 0.0)) {
        throw std::invalid_argument("sigma_p must be positive");
    }
    if (trials == 0) {
        throw std::invalid_argument("trials must be >= 1");
    }
    BoundCheck out;
    out.n_rep = n_rep;
    out.sigma_p = sigma_p;
    const double root_log = std::sqrt(std::log(static_cast<double>(n_rep)));
    out.lower = sigma_p * root_log / std::sqrt(std::numbers::pi * std::log(2.0));
    out.upper = std::numbers::sqrt2 * sigma_p * root_log;

    Rng rng = Rng(seed).derive({n_rep});
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < n_rep; ++r) {
            best = std::max(best, sigma_p * rng.normal());
        }
        sum += best;
    }
    out.empirical = sum / static_cast<double>(trials);
    return out;
}

}  // namespace dube::biaslab
