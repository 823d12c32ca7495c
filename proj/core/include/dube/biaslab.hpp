#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dube/rng.hpp"

namespace dube::biaslab {

/// Two 1-D Gaussian classes; the minority ("positive") lies to the left.
struct ToyConfig {
    std::size_t n_min = 3;
    std::size_t n_maj = 15;
    double mu_min = -2.0;
    double mu_maj = 2.0;
    double sigma = 1.0;
    std::size_t trials = 10000;
    std::uint64_t seed = 0;

    void validate() const;
    double optimal_boundary() const noexcept { return (mu_min + mu_maj) / 2.0; }
};

enum class Strategy { None, RUS, ROS, SMOTE1D, RHS };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);
inline constexpr Strategy kAllStrategies[] = {Strategy::None, Strategy::RUS, Strategy::ROS, Strategy::SMOTE1D,
                                              Strategy::RHS};

struct BiasTrialReport {
    Strategy strategy = Strategy::None;
    double alpha_sigma = 0.0;
    double mean_bias = 0.0;      ///< mean of |zeta* - zeta_hat|
    double var_bias = 0.0;       ///< population variance of the same
    double mean_signed = 0.0;    ///< mean of zeta_hat - zeta*
    std::size_t trials = 0;
};

/// Midpoint between the largest positive and the smallest negative point.
/// Used whether or not the two classes are separable.
double max_margin_1d(std::span<const double> positives, std::span<const double> negatives);

/// Overload on a labelled sample (label 1 = positive).
double max_margin_1d(std::span<const double> xs, std::span<const int> ys);

/// Largest |x - mu| over the points.
double d_max(std::span<const double> points, double mu);

/// 1-D SMOTE: each synthetic point interpolates a uniformly chosen seed with one
/// of its k nearest neighbours (ties by lower index) at a uniform fraction.
std::vector<double> smote_1d(std::span<const double> points, std::size_t k_neighbors, std::size_t n_new, Rng& rng);

/// Monte Carlo decision bias. Trial i draws its dataset from a stream that
/// depends only on (seed, i), so different strategies see the same datasets.
/// `threads` > 1 distributes trials; the report is identical to the serial one.
BiasTrialReport run_bias_trials(const ToyConfig& cfg, Strategy strategy, double alpha_sigma,
                                std::size_t threads = 1);

/// Signed bias zeta_hat - zeta* for trial `trial` (exposed for paired checks).
double bias_trial(const ToyConfig& cfg, Strategy strategy, double alpha_sigma, std::size_t trial);

struct BoundCheck {
    std::size_t n_rep = 1;
    double sigma_p = 0.0;
    double empirical = 0.0;  ///< mean of max over n_rep N(0, sigma_p^2) draws
    double lower = 0.0;      ///< sigma_p * sqrt(log n_rep) / sqrt(pi * log 2)
    double upper = 0.0;      ///< sqrt(2) * sigma_p * sqrt(log n_rep)
};

BoundCheck check_pbda_bound(std::size_t n_rep, double sigma_p, std::size_t trials, std::uint64_t seed = 0);

}  // namespace dube::biaslab
