#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dube/biaslab.hpp"
#include "dube/rng.hpp"

using namespace dube;
using namespace dube::biaslab;

TEST_CASE("max-margin boundary examples")
{
    CHECK(max_margin_1d(std::vector<double>{-1}, std::vector<double>{1}) == 0.0);
    CHECK(max_margin_1d(std::vector<double>{0, 1}, std::vector<double>{3, 5}) == 2.0);
    CHECK(max_margin_1d(std::vector<double>{0, 4}, std::vector<double>{3, 5}) == 3.5);
    const std::vector<double> xs{0, 3, 1, 5};
    const std::vector<int> ys{1, 0, 1, 0};
    CHECK(max_margin_1d(xs, ys) == 2.0);
    CHECK_THROWS_AS(max_margin_1d(std::vector<double>{}, std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("d_max examples")
{
    CHECK(d_max(std::vector<double>{1, 3}, 0.0) == 3.0);
    CHECK(d_max(std::vector<double>{2.5}, 2.5) == 0.0);
    CHECK_THROWS_AS(d_max(std::vector<double>{}, 0.0), std::invalid_argument);
}

TEST_CASE("property: expected d_max grows with the sample count")
{
    Rng rng(1);
    double sum3 = 0.0, sum15 = 0.0;
    for (int t = 0; t < 10000; ++t) {
        std::vector<double> draws(18);
        for (auto& v : draws) {
            v = rng.normal();
        }
        sum3 += d_max(std::span<const double>(draws).first(3), 0.0);
        sum15 += d_max(std::span<const double>(draws).subspan(3), 0.0);
    }
    CHECK(sum15 > sum3);
}

TEST_CASE("smote 1-d")
{
    Rng rng(2);
    const auto pair = smote_1d(std::vector<double>{0, 1}, 1, 100, rng);
    CHECK(pair.size() == 100);
    for (double v : pair) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(smote_1d(std::vector<double>{0, 1}, 1, 0, rng).empty());
    CHECK_THROWS_AS(smote_1d(std::vector<double>{0}, 1, 3, rng), std::invalid_argument);
    CHECK_THROWS_AS(smote_1d(std::vector<double>{0, 1}, 2, 3, rng), std::invalid_argument);
}

TEST_CASE("property: smote keeps d_max and the hull")
{
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> pts(2 + rng.index(8));
        for (auto& v : pts) {
            v = rng.normal(-2.0, 1.0);
        }
        const auto k = std::min<std::size_t>(5, pts.size() - 1);
        const auto extra = smote_1d(pts, k, 1 + rng.index(20), rng);
        auto all = pts;
        all.insert(all.end(), extra.begin(), extra.end());
        CHECK(d_max(all, -2.0) == d_max(pts, -2.0));
        CHECK(*std::max_element(all.begin(), all.end()) == *std::max_element(pts.begin(), pts.end()));
        CHECK(*std::min_element(all.begin(), all.end()) == *std::min_element(pts.begin(), pts.end()));
    }
}

TEST_CASE("property: ROS and SMOTE leave the boundary unchanged on every trial")
{
    ToyConfig cfg;
    for (std::size_t trial = 0; trial < 500; ++trial) {
        const double base = bias_trial(cfg, Strategy::None, 0.0, trial);
        CHECK(bias_trial(cfg, Strategy::ROS, 0.0, trial) == base);
        CHECK(bias_trial(cfg, Strategy::SMOTE1D, 0.0, trial) == base);
    }
}

TEST_CASE("bias trials: aggregates")
{
    ToyConfig cfg;
    cfg.trials = 2000;
    const auto none = run_bias_trials(cfg, Strategy::None, 0.0);
    const auto ros = run_bias_trials(cfg, Strategy::ROS, 0.0);
    CHECK(ros.mean_bias == none.mean_bias);
    CHECK(ros.var_bias == none.var_bias);
    CHECK(none.trials == 2000);
    CHECK(none.var_bias > 0.0);

    // direct recomputation of the aggregate from individual trials
    double sum = 0.0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
        sum += std::abs(bias_trial(cfg, Strategy::None, 0.0, i));
    }
    CHECK(none.mean_bias == doctest::Approx(sum / 2000.0).epsilon(1e-12));

    cfg.trials = 1;
    const auto single = run_bias_trials(cfg, Strategy::RUS, 0.2);
    CHECK(single.var_bias == 0.0);
    CHECK(single.trials == 1);
}

TEST_CASE("bias trials: RUS and RHS lower the mean bias")
{
    ToyConfig cfg;
    const auto none = run_bias_trials(cfg, Strategy::None, 0.0);
    CHECK(run_bias_trials(cfg, Strategy::RUS, 0.0).mean_bias < none.mean_bias);
    CHECK(run_bias_trials(cfg, Strategy::RHS, 0.0).mean_bias < none.mean_bias);
}

TEST_CASE("bias trials do not depend on the thread count")
{
    ToyConfig cfg;
    cfg.trials = 3001;
    for (auto s : kAllStrategies) {
        const auto serial = run_bias_trials(cfg, s, 0.2, 1);
        const auto threaded = run_bias_trials(cfg, s, 0.2, 7);
        CHECK(serial.mean_bias == threaded.mean_bias);
        CHECK(serial.var_bias == threaded.var_bias);
        CHECK(serial.mean_signed == threaded.mean_signed);
    }
}

TEST_CASE("toy config validation")
{
    ToyConfig cfg;
    cfg.n_min = 0;
    CHECK_THROWS_AS(run_bias_trials(cfg, Strategy::None, 0.0), std::invalid_argument);
    cfg = {};
    cfg.sigma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.mu_maj = cfg.mu_min;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(run_bias_trials(ToyConfig{}, Strategy::None, -0.1), std::invalid_argument);
    CHECK(ToyConfig{}.optimal_boundary() == 0.0);
    CHECK(parse_strategy("smote1d") == Strategy::SMOTE1D);
    CHECK_THROWS_AS(parse_strategy("adasyn"), std::invalid_argument);
}

TEST_CASE("perturbation bound: single replicate")
{
    const auto b = check_pbda_bound(1, 0.5, 100000, 0);
    CHECK(b.lower == 0.0);
    CHECK(b.upper == 0.0);
    CHECK(std::abs(b.empirical) < 0.01);
}

TEST_CASE("perturbation bound: four replicates")
{
    const auto b = check_pbda_bound(4, 1.0, 100000, 0);
    CHECK(b.lower == doctest::Approx(std::sqrt(std::log(4.0)) / std::sqrt(M_PI * std::log(2.0))));
    CHECK(b.upper == doctest::Approx(std::sqrt(2.0 * std::log(4.0))));
    CHECK(b.lower == doctest::Approx(0.798).epsilon(1e-3));
    CHECK(b.upper == doctest::Approx(1.665).epsilon(1e-3));
    CHECK(b.empirical >= b.lower);
    CHECK(b.empirical <= b.upper);
}

TEST_CASE("property: the perturbation bound is scale equivariant")
{
    for (std::size_t n_rep : {2, 4, 16}) {
        const auto one = check_pbda_bound(n_rep, 0.1, 20000, 5);
        const auto two = check_pbda_bound(n_rep, 0.2, 20000, 5);
        CHECK(two.empirical == doctest::Approx(2.0 * one.empirical).epsilon(1e-12));
        CHECK(two.lower == doctest::Approx(2.0 * one.lower));
        CHECK(two.upper == doctest::Approx(2.0 * one.upper));
    }
    CHECK_THROWS_AS(check_pbda_bound(0, 0.1, 10), std::invalid_argument);
    CHECK_THROWS_AS(check_pbda_bound(2, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(check_pbda_bound(2, 0.1, 0), std::invalid_argument);
}
