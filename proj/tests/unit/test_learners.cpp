#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dube/dataset.hpp"
#include "dube/ensemble.hpp"
#include "dube/learners.hpp"
#include "dube/rng.hpp"

using namespace dube;

namespace {

double training_accuracy(const Classifier& model, const Dataset& ds)
{
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        hits += argmax_class(model.predict_proba(ds.row(i))) == ds.label(i) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(ds.rows());
}

void check_distribution(std::span<const double> p)
{
    double sum = 0.0;
    for (double v : p) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

}  // namespace

TEST_CASE("tree: separable pair")
{
    const Dataset ds({0.0, 1.0}, 1, {0, 1}, 2);
    TreeParams params;
    params.max_depth = 1;
    const auto tree = DecisionTree::fit(ds, params);
    CHECK(tree.predict_proba(std::vector<double>{0.0}) == std::vector<double>{1.0, 0.0});
    CHECK(tree.predict_proba(std::vector<double>{1.0}) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("tree: single-class training set is one leaf")
{
    const Dataset ds({0.0, 1.0, 2.0}, 1, {1, 1, 1}, 2);
    const auto tree = DecisionTree::fit(ds, {});
    CHECK(tree.node_count() == 1);
    CHECK(tree.predict_proba(std::vector<double>{5.0}) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("tree: xor with depth two")
{
    const Dataset ds({0, 0, 0, 1, 1, 0, 1, 1}, 2, {0, 1, 1, 0}, 2);
    TreeParams params;
    params.max_depth = 2;
    const auto tree = DecisionTree::fit(ds, params);
    CHECK(training_accuracy(tree, ds) == 1.0);
    CHECK(tree.depth() == 2);
    params.max_depth = 1;
    CHECK(training_accuracy(DecisionTree::fit(ds, params), ds) < 1.0);
}

TEST_CASE("tree: ties go to the lowest feature then threshold")
{
    // both features separate perfectly; feature 0 must win
    const Dataset ds({0, 10, 1, 11, 5, 20, 6, 21}, 2, {0, 0, 1, 1}, 2);
    const auto tree = DecisionTree::fit(ds, {});
    std::stringstream s;
    tree.save(s);
    CHECK(s.str().find("S 0 3") != std::string::npos);
}

TEST_CASE("tree: errors")
{
    CHECK_THROWS_AS(DecisionTree::fit(Dataset({}, 1, {}, 2), {}), std::invalid_argument);
    TreeParams bad;
    bad.min_samples_leaf = 0;
    CHECK_THROWS_AS(DecisionTree::fit(Dataset({0.0, 1.0}, 1, {0, 1}, 2), bad), std::invalid_argument);
    const auto tree = DecisionTree::fit(Dataset({0.0, 1.0}, 1, {0, 1}, 2), {});
    CHECK_THROWS_AS(tree.predict_proba(std::vector<double>{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("property: tree training accuracy is nondecreasing in depth")
{
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Dataset ds = make_overlap_2d(40, 160, Overlap::High, seed);
        for (auto criterion : {SplitCriterion::Gini, SplitCriterion::Entropy}) {
            double previous = 0.0;
            for (std::size_t depth = 1; depth <= 12; ++depth) {
                TreeParams params;
                params.max_depth = depth;
                params.criterion = criterion;
                const double acc = training_accuracy(DecisionTree::fit(ds, params), ds);
                CHECK(acc >= previous);
                previous = acc;
            }
            CHECK(training_accuracy(DecisionTree::fit(ds, TreeParams{0, 1, criterion, 0.0}), ds) == 1.0);
        }
    }
}

TEST_CASE("tree: min_samples_leaf and laplace")
{
    const Dataset ds = make_overlap_2d(30, 120, Overlap::High, 3);
    TreeParams params;
    params.min_samples_leaf = 10;
    const auto tree = DecisionTree::fit(ds, params);
    CHECK(tree.node_count() < DecisionTree::fit(ds, {}).node_count());
    params = {};
    params.laplace = 1.0;
    const auto smooth = DecisionTree::fit(ds, params);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const auto p = smooth.predict_proba(ds.row(i));
        CHECK(p[0] > 0.0);
        CHECK(p[1] > 0.0);
    }
}

TEST_CASE("knn: exact match with k = 1")
{
    const Dataset ds({0, 0, 1, 1, 5, 5}, 2, {0, 1, 1}, 2);
    const auto knn = KnnClassifier::fit(ds, 1);
    CHECK(knn.predict_proba(std::vector<double>{1, 1}) == std::vector<double>{0.0, 1.0});
    CHECK(knn.predict_proba(std::vector<double>{0, 0}) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("knn: k = N gives the class prior")
{
    const Dataset ds = make_overlap_2d(5, 15, Overlap::Low, 1);
    const auto knn = KnnClassifier::fit(ds, ds.rows());
    for (double q : {-10.0, 0.0, 10.0}) {
        const auto p = knn.predict_proba(std::vector<double>{q, q});
        CHECK(p[0] == doctest::Approx(0.75));
        CHECK(p[1] == doctest::Approx(0.25));
    }
}

TEST_CASE("knn: k = 2 with one neighbour per class")
{
    const Dataset ds({-1, 0, 1, 0}, 2, {0, 1}, 2);
    const auto knn = KnnClassifier::fit(ds, 2);
    CHECK(knn.predict_proba(std::vector<double>{0, 0}) == std::vector<double>{0.5, 0.5});
}

TEST_CASE("knn: k = 3 against an exhaustive distance sort")
{
    const std::vector<double> xs{0, 0, 1, 0, 0, 2, 3, 3, 2, 1};
    const std::vector<ClassId> ys{0, 1, 1, 0, 1};
    const Dataset ds(xs, 2, ys, 2);
    const auto knn = KnnClassifier::fit(ds, 3);
    Rng rng(8);
    for (int q = 0; q < 50; ++q) {
        const std::vector<double> x{rng.uniform() * 4 - 0.5, rng.uniform() * 4 - 0.5};
        std::vector<std::size_t> order(5);
        std::iota(order.begin(), order.end(), 0);
        auto dist = [&](std::size_t i) {
            return (xs[2 * i] - x[0]) * (xs[2 * i] - x[0]) + (xs[2 * i + 1] - x[1]) * (xs[2 * i + 1] - x[1]);
        };
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dist(a) < dist(b); });
        std::vector<double> expected(2, 0.0);
        for (int j = 0; j < 3; ++j) {
            expected[ys[order[j]]] += 1.0 / 3.0;
        }
        const auto got = knn.predict_proba(x);
        CHECK(got[0] == doctest::Approx(expected[0]));
        CHECK(got[1] == doctest::Approx(expected[1]));
    }
}

TEST_CASE("knn: errors")
{
    const Dataset ds({0.0, 1.0}, 1, {0, 1}, 2);
    CHECK_THROWS_AS(KnnClassifier::fit(ds, 3), std::invalid_argument);
    CHECK_THROWS_AS(KnnClassifier::fit(ds, 0), std::invalid_argument);
}

TEST_CASE("property: knn with k = 1 fits distinct points exactly")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset ds = make_overlap_2d(20, 80, Overlap::High, seed);
        CHECK(training_accuracy(KnnClassifier::fit(ds, 1), ds) == 1.0);
    }
}

TEST_CASE("property: probability vectors are normalised")
{
    const Dataset ds = make_overlap_2d(25, 100, Overlap::High, 4);
    const Dataset probe = make_overlap_2d(25, 25, Overlap::Low, 5);
    std::vector<ClassifierPtr> models;
    models.push_back(LearnerSpec{}.fit(ds, 0));
    LearnerSpec shallow;
    shallow.tree.max_depth = 3;
    models.push_back(shallow.fit(ds, 0));
    for (std::size_t k : {1, 4, 7}) {
        LearnerSpec knn;
        knn.kind = LearnerKind::Knn;
        knn.knn_k = k;
        models.push_back(knn.fit(ds, 0));
    }
    for (const auto& m : models) {
        for (std::size_t i = 0; i < probe.rows(); ++i) {
            check_distribution(m->predict_proba(probe.row(i)));
        }
    }
}

TEST_CASE("save and load round trip")
{
    const Dataset ds = make_overlap_2d(25, 100, Overlap::High, 6);
    LearnerSpec knn;
    knn.kind = LearnerKind::Knn;
    for (const auto& model : {LearnerSpec{}.fit(ds, 0), knn.fit(ds, 0)}) {
        std::stringstream buf;
        model->save(buf);
        const auto back = load_classifier(buf);
        REQUIRE(back->num_classes() == 2);
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            CHECK(back->predict_proba(ds.row(i)) == model->predict_proba(ds.row(i)));
        }
    }
    std::stringstream junk("forest 1 2 3");
    CHECK_THROWS_AS(load_classifier(junk), std::runtime_error);
}

TEST_CASE("learner names parse")
{
    CHECK(parse_learner_kind("knn") == LearnerKind::Knn);
    CHECK(to_string(LearnerKind::Tree) == "tree");
    CHECK(parse_split_criterion("entropy") == SplitCriterion::Entropy);
    CHECK_THROWS_AS(parse_learner_kind("svm"), std::invalid_argument);
}
