#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "dube/dataset.hpp"
#include "dube/pbda.hpp"
#include "dube/rng.hpp"

using namespace dube;

TEST_CASE("two-point covariance")
{
    const Dataset ds({0, 0, 2, 2, 9, 9}, 2, {0, 0, 1}, 2);
    const auto cc = class_covariance(ds, 0);
    CHECK(cc.count == 2);
    CHECK(cc.mean(0) == 1.0);
    CHECK(cc.mean(1) == 1.0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(cc.cov(i, j) == doctest::Approx(2.0));
        }
    }
    // rank-one covariance still gets a usable factor
    CHECK((cc.factor * cc.factor.transpose() - cc.cov).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("singleton class gives a zero covariance and no perturbation")
{
    const Dataset ds({0, 0, 2, 2, 9, 9}, 2, {0, 0, 1}, 2);
    const auto cc = class_covariance(ds, 1);
    CHECK(cc.cov.isZero(0.0));
    CHECK(cc.factor.isZero(0.0));
    Rng rng(1);
    const std::vector<double> x{9, 9, 1, 2};
    CHECK(perturb(x, 3.0, cc, rng) == x);
}

TEST_CASE("covariance errors")
{
    const Dataset ds({0, 1, 2}, 1, {0, 0, 0}, 2);
    CHECK_THROWS_AS(class_covariance(ds, 1), std::invalid_argument);
    CHECK_THROWS_AS(class_covariance(ds, 5), std::invalid_argument);
}

TEST_CASE("property: covariance is symmetric and PSD")
{
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + rng.index(6);
        const std::size_t n = 2 + rng.index(10);
        std::vector<double> xs(n * d);
        for (auto& v : xs) {
            v = rng.normal();
        }
        // duplicate a column to force a singular matrix now and then
        if (d > 1 && trial % 3 == 0) {
            for (std::size_t i = 0; i < n; ++i) {
                xs[i * d + 1] = xs[i * d];
            }
        }
        const Dataset ds(xs, d, std::vector<ClassId>(n, 0), 1);
        const auto cc = class_covariance(ds, 0);
        CHECK((cc.cov - cc.cov.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cc.cov);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
        CHECK((cc.factor * cc.factor.transpose() - cc.cov).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("covariance estimate of a known diagonal gaussian")
{
    Rng rng(3);
    const double sd[3] = {1.0, 2.0, 0.5};
    const std::size_t n = 5000;
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) {
        for (double s : sd) {
            xs.push_back(10.0 + s * rng.normal());
        }
    }
    const Dataset ds(xs, 3, std::vector<ClassId>(n, 0), 1);
    const auto cc = class_covariance(ds, 0);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(cc.cov(i, i) / (sd[i] * sd[i]) - 1.0) < 0.05);
        for (int j = 0; j < 3; ++j) {
            if (i != j) {
                CHECK(std::abs(cc.cov(i, j)) < 0.05 * sd[i] * sd[j]);
            }
        }
    }
}

TEST_CASE("psd factor")
{
    Eigen::MatrixXd spd(2, 2);
    spd << 4, 2, 2, 3;
    const auto l = psd_factor(spd);
    CHECK((l * l.transpose() - spd).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(l(0, 1) == 0.0);
    CHECK(psd_factor(Eigen::MatrixXd::Zero(3, 3)).isZero(0.0));
    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1, 2, 2, 1;
    const auto f = psd_factor(indefinite);
    CHECK(f.allFinite());
}

TEST_CASE("perturb: alpha zero is the identity")
{
    const Dataset ds = make_overlap_2d(10, 40, Overlap::Mid, 1);
    const auto cc = class_covariance(ds, 0);
    Rng rng(4);
    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    CHECK(perturb(x, 0.0, cc, rng) == x);
}

TEST_CASE("perturb: errors")
{
    const Dataset ds = make_overlap_2d(10, 40, Overlap::Mid, 1);
    const auto cc = class_covariance(ds, 0);
    Rng rng(5);
    CHECK_THROWS_AS(perturb({1, 2}, -0.1, cc, rng), std::invalid_argument);
    CHECK_THROWS_AS(perturb({1, 2, 3}, 0.1, cc, rng), std::invalid_argument);
}

TEST_CASE("perturb: identity covariance gives unit variance")
{
    ClassCovariance cc;
    cc.mean = Eigen::VectorXd::Zero(2);
    cc.cov = Eigen::MatrixXd::Identity(2, 2);
    cc.factor = psd_factor(cc.cov);
    Rng rng(6);
    const std::vector<double> origin(2 * 10000, 0.0);
    const auto out = perturb(origin, 1.0, cc, rng);
    CHECK(out.size() == origin.size());
    for (int j = 0; j < 2; ++j) {
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < 10000; ++i) {
            s1 += out[2 * i + j];
            s2 += out[2 * i + j] * out[2 * i + j];
        }
        const double var = s2 / 10000 - (s1 / 10000) * (s1 / 10000);
        CHECK(std::abs(var - 1.0) < 0.05);
    }
}

TEST_CASE("property: perturbation covariance converges to the class covariance")
{
    Rng gen(7);
    std::vector<double> xs;
    for (int i = 0; i < 400; ++i) {
        const double a = gen.normal();
        const double b = gen.normal();
        xs.push_back(2.0 * a);
        xs.push_back(a + 0.5 * b);
    }
    const Dataset ds(xs, 2, std::vector<ClassId>(400, 0), 1);
    const auto cc = class_covariance(ds, 0);
    const std::size_t n = 20000;
    const double alpha = 0.3;
    std::vector<double> base(2 * n);
    for (auto& v : base) {
        v = gen.uniform();
    }
    Rng rng(8);
    const auto out = perturb(base, alpha, cc, rng);
    Eigen::Matrix2d emp = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d z((out[2 * i] - base[2 * i]) / alpha, (out[2 * i + 1] - base[2 * i + 1]) / alpha);
        emp += z * z.transpose();
    }
    emp /= static_cast<double>(n);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(emp(i, j) - cc.cov(i, j)) < 0.05 * std::sqrt(cc.cov(i, i) * cc.cov(j, j)));
        }
    }
}

TEST_CASE("perturb is deterministic under a seed")
{
    const Dataset ds = make_overlap_2d(10, 40, Overlap::Mid, 1);
    const auto cc = class_covariance(ds, 1);
    Rng a(9), b(9);
    const std::vector<double> x{0, 0, 1, 1};
    CHECK(perturb(x, 0.5, cc, a) == perturb(x, 0.5, cc, b));
}
