#include <random>

#include "doctest.h"
#include "stackline/error.hpp"
#include "stackline/metrics.hpp"
#include "support.hpp"

using namespace stackline;
using testsupport::brute_scores;
using testsupport::pairwise_auc;

TEST_CASE("confusion counts") {
    const std::vector<int> y = {1, 1, 0, 0};
    CHECK(confusion(y, y) == ConfusionMatrix{2, 2, 0, 0});
    const std::vector<int> all_one = {1, 1, 1, 1};
    const std::vector<int> half = {1, 0, 1, 0};
    CHECK(confusion(half, all_one) == ConfusionMatrix{2, 0, 2, 0});
    const std::vector<int> a = {1, 0}, b = {0, 1};
    const auto m = confusion(a, b);
    CHECK(m.fn == 1);
    CHECK(m.fp == 1);
    const std::vector<int> shorter = {1};
    CHECK_THROWS_AS(confusion(a, shorter), ShapeError);
}

TEST_CASE("scores on fixed matrices") {
    const auto perfect = scores({50, 50, 0, 0});
    CHECK(perfect.accuracy.binary == 1.0);
    CHECK(perfect.precision.binary == 1.0);
    CHECK(perfect.recall.binary == 1.0);
    CHECK(perfect.f1.binary == 1.0);

    const auto even = scores({25, 25, 25, 25});
    CHECK(even.accuracy.binary == doctest::Approx(0.5));
    CHECK(even.precision.weighted == doctest::Approx(0.5));
    CHECK(even.recall.macro == doctest::Approx(0.5));
    CHECK(even.f1.binary == doctest::Approx(0.5));

    // precision 8/10, recall 8/16
    const auto pr = scores({8, 0, 2, 8});
    CHECK(pr.precision.binary == doctest::Approx(0.8));
    CHECK(pr.recall.binary == doctest::Approx(0.5));
    CHECK(pr.f1.binary == doctest::Approx(2.0 * 0.4 / 1.3).epsilon(1e-12));
    CHECK(pr.f1.binary == doctest::Approx(0.6154).epsilon(1e-4));

    CHECK_THROWS_AS(scores({0, 0, 0, 0}), StatError);
}

TEST_CASE("degenerate divisions report zero with a flag") {
    // No positive predictions: precision of class 1 is 0/0.
    const auto s = scores({0, 5, 0, 5});
    CHECK(s.precision.binary == 0.0);
    CHECK(s.precision_degenerate);
    CHECK(s.f1.binary == 0.0);
    CHECK(s.f1_degenerate);
    const auto t = scores({3, 3, 1, 1});
    CHECK_FALSE(t.precision_degenerate);
    CHECK_FALSE(t.recall_degenerate);
}

TEST_CASE("scores equal a brute-force recount") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + gen() % 200;
        const double bias = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
        std::vector<int> y(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = std::uniform_real_distribution<double>(0.0, 1.0)(gen) < bias;
            pred[i] = gen() % 2;
        }
        const auto o = brute_scores(y, pred);
        const auto s = scores(confusion(y, pred));
        REQUIRE(s.accuracy.binary == o.accuracy);
        REQUIRE(s.precision.binary == o.precision[1]);
        REQUIRE(s.recall.binary == o.recall[1]);
        REQUIRE(s.f1.binary == o.f1[1]);
        REQUIRE(s.precision.macro == testsupport::macro(o.precision));
        REQUIRE(s.recall.macro == testsupport::macro(o.recall));
        REQUIRE(s.f1.macro == testsupport::macro(o.f1));
        REQUIRE(s.precision.weighted == testsupport::weighted(o.precision, o.support));
        REQUIRE(s.recall.weighted == testsupport::weighted(o.recall, o.support));
        REQUIRE(s.f1.weighted == testsupport::weighted(o.f1, o.support));
    }
}

TEST_CASE("roc examples") {
    const std::vector<int> y = {1, 0, 1, 0};
    const std::vector<double> p = {0.9, 0.8, 0.7, 0.1};
    CHECK(roc_auc(y, p).auc == doctest::Approx(0.75).epsilon(1e-12));

    const std::vector<double> ordered = {0.9, 0.1, 0.8, 0.2};
    CHECK(roc_auc(y, ordered).auc == 1.0);

    const std::vector<double> flat = {0.5, 0.5, 0.5, 0.5};
    const auto c = roc_auc(y, flat);
    CHECK(c.auc == 0.5);
    REQUIRE(c.points.size() == 2);  // the single tied step lands on (1,1)

    const std::vector<int> one_class = {1, 1};
    const std::vector<double> two = {0.2, 0.3};
    CHECK_THROWS_WITH_AS(roc_auc(one_class, two), doctest::Contains("AUC undefined"), StatError);
}

TEST_CASE("roc curve shape and rank-oracle agreement") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + gen() % 150;
        std::vector<int> y(n);
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = gen() % 2;
            // Coarse grid so ties are common.
            p[i] = static_cast<double>(gen() % 11) / 10.0;
        }
        y[0] = 0;
        y[1] = 1;
        const auto c = roc_auc(y, p);
        REQUIRE(c.points.front() == RocPoint{0.0, 0.0});
        REQUIRE(c.points.back() == RocPoint{1.0, 1.0});
        for (std::size_t k = 1; k < c.points.size(); ++k) {
            REQUIRE(c.points[k].fpr >= c.points[k - 1].fpr);
            REQUIRE(c.points[k].tpr >= c.points[k - 1].tpr);
        }
        REQUIRE(std::fabs(c.auc - pairwise_auc(y, p)) < 1e-9);

        // Strictly increasing transform.
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = std::exp(3.0 * p[i]) - 7.0;
        REQUIRE(std::fabs(roc_auc(y, q).auc - c.auc) < 1e-12);

        // Swap classes and flip scores.
        std::vector<int> flipped_y(n);
        std::vector<double> flipped_p(n);
        for (std::size_t i = 0; i < n; ++i) {
            flipped_y[i] = 1 - y[i];
            flipped_p[i] = 1.0 - p[i];
        }
        REQUIRE(std::fabs(roc_auc(flipped_y, flipped_p).auc - c.auc) < 1e-12);
    }
}

TEST_CASE("evaluate thresholds at one half and serializes") {
    const std::vector<int> y = {1, 0, 1, 0};
    const std::vector<double> p = {0.5, 0.49, 0.2, 0.9};
    const auto r = evaluate(y, p, "m", "test");
    CHECK(r.matrix == ConfusionMatrix{1, 1, 1, 1});
    const auto doc = r.to_json();
    CHECK(doc.at("model") == "m");
    CHECK(doc.contains("auc"));
}

TEST_CASE("svg output is deterministic and well formed") {
    const std::vector<int> y = {1, 0, 1, 0};
    const std::vector<double> p = {0.9, 0.8, 0.7, 0.1};
    const auto curve = roc_auc(y, p);
    const std::string a = roc_svg({{"model", curve}}, "ROC");
    const std::string b = roc_svg({{"model", curve}}, "ROC");
    CHECK(a == b);
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("0.750") != std::string::npos);
    const std::string cm = confusion_svg({3, 4, 1, 2}, "Confusion");
    CHECK(cm.find(">3<") != std::string::npos);
}
