#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dube/balancing.hpp"
#include "dube/dataset.hpp"
#include "dube/ensemble.hpp"

using namespace dube;

namespace {

class ConstantModel final : public Classifier {
public:
    explicit ConstantModel(std::vector<double> p, std::size_t d = 1) : p_(std::move(p)), d_(d) {}
    std::size_t num_classes() const noexcept override { return p_.size(); }
    std::size_t num_features() const noexcept override { return d_; }
    void predict_proba(std::span<const double>, std::span<double> out) const override
    {
        std::copy(p_.begin(), p_.end(), out.begin());
    }
    void save(std::ostream&) const override {}

private:
    std::vector<double> p_;
    std::size_t d_;
};

EnsembleModel stubs(const std::vector<std::vector<double>>& outputs)
{
    std::vector<ClassifierPtr> members;
    for (const auto& p : outputs) {
        members.push_back(std::make_shared<ConstantModel>(p));
    }
    return EnsembleModel(members, outputs.front().size(), 1, DubeConfig{});
}

std::string dump(const EnsembleModel& model)
{
    std::ostringstream out;
    model.save(out);
    return out.str();
}

const std::vector<double> x0{0.0};

}  // namespace

TEST_CASE("soft vote of stub members")
{
    const auto two = stubs({{1, 0}, {0, 1}});
    CHECK(two.predict_proba(x0) == std::vector<double>{0.5, 0.5});
    CHECK(two.predict(x0) == 0);

    const std::vector<std::vector<double>> outs{{0.1, 0.9}, {0.4, 0.6}, {0.7, 0.3}, {0.2, 0.8}};
    const auto four = stubs(outs);
    const auto p = four.predict_proba(x0);
    double direct = 0.0;
    for (const auto& o : outs) {
        direct += o[0];
    }
    CHECK(p[0] == doctest::Approx(direct / 4.0));
    CHECK(p[0] + p[1] == doctest::Approx(1.0));
    CHECK(four.predict(x0) == 1);

    CHECK(stubs({{0.9, 0.1}}).predict(x0) == 0);
    CHECK(stubs({{0.2, 0.5, 0.3}}).predict(x0) == 1);
    CHECK_THROWS_AS(two.predict_proba(std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("argmax ties go to the lowest class")
{
    CHECK(argmax_class(std::vector<double>{0.5, 0.5}) == 0);
    CHECK(argmax_class(std::vector<double>{0.2, 0.4, 0.4}) == 1);
}

TEST_CASE("k = 1 is a single learner on the raw data")
{
    const Dataset ds = make_overlap_2d(20, 80, Overlap::High, 1);
    DubeConfig cfg;
    cfg.k = 1;
    std::size_t calls = 0;
    FitOptions options;
    options.observer = [&](const IterationTrace& t) {
        ++calls;
        CHECK(t.iteration == 1);
        CHECK(t.resampled_rows.size() == ds.rows());
    };
    const auto model = dube_fit(ds, cfg, options);
    CHECK(model.size() == 1);
    CHECK(calls == 1);
    const auto single = cfg.learner.fit(ds, 0);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        CHECK(model.predict_proba(ds.row(i)) == single->predict_proba(ds.row(i)));
    }
}

TEST_CASE("uniform RUS trace: class sizes equal the minority count")
{
    const Dataset ds({0, 1, 2, 3, 10, 11}, 1, {0, 0, 0, 0, 1, 1}, 2);
    DubeConfig cfg;
    cfg.k = 3;
    cfg.inter = InterStrategy::RUS;
    cfg.intra.kind = IntraStrategy::Kind::Uniform;
    std::vector<IterationTrace> traces;
    FitOptions options;
    options.observer = [&](const IterationTrace& t) { traces.push_back(t); };
    dube_fit(ds, cfg, options);
    REQUIRE(traces.size() == 3);
    for (std::size_t t = 1; t < 3; ++t) {
        CHECK(traces[t].target == target_class_size(class_counts(ds), InterStrategy::RUS));
        CHECK(traces[t].class_sizes == std::vector<std::size_t>{2, 2});
    }
}

TEST_CASE("property: every iteration draws m * target rows, class by class")
{
    for (auto inter : {InterStrategy::RUS, InterStrategy::ROS, InterStrategy::RHS}) {
        for (auto kind : {IntraStrategy::Kind::Uniform, IntraStrategy::Kind::HEM, IntraStrategy::Kind::SHEM}) {
            const Dataset ds = make_overlap_2d(15, 60, Overlap::High, 2);
            DubeConfig cfg;
            cfg.k = 4;
            cfg.inter = inter;
            cfg.intra.kind = kind;
            cfg.alpha = 0.3;
            FitOptions options;
            options.observer = [&](const IterationTrace& t) {
                if (t.iteration == 1) {
                    return;
                }
                CHECK(t.target == target_class_size(class_counts(ds), inter));
                CHECK(t.resampled_rows.size() == 2 * t.target);
                for (std::size_t j = 0; j < t.resampled_rows.size(); ++j) {
                    CHECK(ds.label(t.resampled_rows[j]) == (j < t.target ? 0u : 1u));
                }
            };
            CHECK(dube_fit(ds, cfg, options).size() == 4);
        }
    }
}

TEST_CASE("buffered predictions give a bit-identical model")
{
    const Dataset ds = make_overlap_2d(30, 120, Overlap::High, 3);
    for (auto kind : {IntraStrategy::Kind::HEM, IntraStrategy::Kind::SHEM}) {
        DubeConfig cfg;
        cfg.k = 6;
        cfg.intra.kind = kind;
        cfg.alpha = 0.2;
        cfg.seed = 17;
        FitOptions unbuffered;
        unbuffered.buffer_predictions = false;
        CHECK(dump(dube_fit(ds, cfg)) == dump(dube_fit(ds, cfg, unbuffered)));
    }
}

TEST_CASE("fitting is deterministic and seed dependent")
{
    const Dataset ds = make_overlap_2d(30, 120, Overlap::High, 4);
    DubeConfig cfg;
    cfg.k = 5;
    cfg.alpha = 0.25;
    const auto a = dump(dube_fit(ds, cfg));
    CHECK(a == dump(dube_fit(ds, cfg)));
    cfg.seed = 1;
    CHECK(a != dump(dube_fit(ds, cfg)));
}

TEST_CASE("growing k keeps the earlier members")
{
    const Dataset ds = make_overlap_2d(30, 120, Overlap::High, 5);
    DubeConfig cfg;
    cfg.k = 3;
    const auto small = dube_fit(ds, cfg);
    cfg.k = 6;
    const auto large = dube_fit(ds, cfg);
    for (std::size_t j = 0; j < 3; ++j) {
        std::ostringstream a, b;
        small.members()[j]->save(a);
        large.members()[j]->save(b);
        CHECK(a.str() == b.str());
    }
}

TEST_CASE("concurrent batch prediction equals serial prediction")
{
    const Dataset ds = make_overlap_2d(40, 400, Overlap::Mid, 6);
    DubeConfig cfg;
    cfg.k = 5;
    const auto model = dube_fit(ds, cfg);
    const auto serial = model.predict_proba_all(ds, 1);
    CHECK(model.predict_proba_all(ds, 4) == serial);
    CHECK(model.predict_proba_all(ds, 64) == serial);
    for (std::size_t i = 0; i < ds.rows(); i += 37) {
        const auto p = model.predict_proba(ds.row(i));
        CHECK(std::equal(p.begin(), p.end(), serial.begin() + static_cast<std::ptrdiff_t>(i * 2)));
    }
}

TEST_CASE("save and load round trip")
{
    const Dataset ds = make_overlap_2d(20, 100, Overlap::Mid, 7);
    DubeConfig cfg;
    cfg.k = 4;
    cfg.alpha = 0.1;
    cfg.learner.kind = LearnerKind::Knn;
    cfg.learner.knn_k = 3;
    const auto model = dube_fit(ds, cfg);
    std::stringstream buf(dump(model));
    const auto back = EnsembleModel::load(buf);
    CHECK(back.size() == 4);
    CHECK(back.config().learner.knn_k == 3);
    CHECK(back.predict_proba_all(ds) == model.predict_proba_all(ds));
    std::stringstream bad("dube-ensemble 9\n");
    CHECK_THROWS_AS(EnsembleModel::load(bad), std::runtime_error);
}

TEST_CASE("config validation and input errors")
{
    DubeConfig cfg;
    cfg.k = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.alpha = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.intra.bins = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    const Dataset one_class({0.0, 1.0}, 1, {0, 0}, 2);
    CHECK_THROWS_AS(dube_fit(one_class, DubeConfig{}), std::invalid_argument);
}

TEST_CASE("multiclass fit produces valid probabilities")
{
    std::vector<double> xs;
    std::vector<ClassId> ys;
    Rng rng(8);
    for (ClassId c = 0; c < 3; ++c) {
        for (int i = 0; i < (c == 0 ? 60 : 15); ++i) {
            xs.push_back(c * 1.5 + rng.normal());
            xs.push_back(rng.normal());
            ys.push_back(c);
        }
    }
    const Dataset ds(xs, 2, ys, 3);
    DubeConfig cfg;
    cfg.alpha = 0.2;
    const auto proba = dube_fit(ds, cfg).predict_proba_all(ds);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        CHECK(proba[3 * i] + proba[3 * i + 1] + proba[3 * i + 2] == doctest::Approx(1.0).epsilon(1e-9));
    }
}
