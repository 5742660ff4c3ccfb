#include <boost/math/special_functions/gamma.hpp>
#include <random>

#include "doctest.h"
#include "stackline/chi2.hpp"
#include "stackline/error.hpp"
#include "support.hpp"

using namespace stackline;

TEST_CASE("hand-computed two by two table") {
    const auto t = ContingencyTable::from_counts({{10, 20}, {20, 10}});
    const auto s = chi_square_statistic(t);
    // Every expected count is 15: 4 * 25 / 15.
    CHECK(s.statistic == doctest::Approx(100.0 / 15.0).epsilon(1e-12));
    CHECK(s.dof == 1);
    CHECK(chi2_sf(s.statistic, s.dof) == doctest::Approx(0.0098).epsilon(0.1));
    CHECK(std::fabs(chi2_sf(s.statistic, s.dof) - 0.0098) < 1e-3);
}

TEST_CASE("independent table gives zero statistic") {
    const auto t = ContingencyTable::from_counts({{10, 20}, {30, 60}});
    CHECK(chi_square_statistic(t).statistic == doctest::Approx(0.0));
    CHECK(chi2_sf(0.0, 1) == 1.0);
}

TEST_CASE("zero rows and columns are removed") {
    const auto t = ContingencyTable::from_counts({{5, 0}, {0, 0}, {3, 0}});
    CHECK(t.n_rows() == 2);
    CHECK(t.n_cols() == 1);
    CHECK(t.degenerate());
    CHECK_THROWS_WITH_AS(chi_square_statistic(t), doctest::Contains("degenerate table"), StatError);
    CHECK_THROWS_AS(ContingencyTable::from_counts({{0, 0}}), StatError);
}

TEST_CASE("contingency cross-tabulation") {
    const std::vector<int> codes = {0, 1, 2, 0, 1, 2};
    const std::vector<int> labels = {0, 0, 0, 1, 1, 1};
    const auto t = contingency(codes, labels, 4);  // level 3 never occurs
    CHECK(t.n_rows() == 3);
    CHECK(t.count(0, 0) == 1);
    CHECK(t.grand_total() == 6);
}

TEST_CASE("chi2_sf domain errors") {
    CHECK_THROWS_AS(chi2_sf(-1.0, 3), DomainError);
    CHECK_THROWS_AS(chi2_sf(1.0, 0), DomainError);
    CHECK_THROWS_AS(chi2_sf(std::nan(""), 2), DomainError);
}

TEST_CASE("chi2_sf against quadrature of the density") {
    for (int k : {1, 2, 5, 10, 50}) {
        for (double x = 0.0; x <= 200.0; x += 2.5) {
            const double expected = testsupport::chi2_sf_quadrature(x, k);
            INFO("k=" << k << " x=" << x);
            REQUIRE(std::fabs(chi2_sf(x, k) - expected) < 1e-8);
        }
    }
}

TEST_CASE("incomplete gamma against boost") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ua(0.05, 60.0), ux(0.0, 150.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = ua(gen), x = ux(gen);
        const double q = boost::math::gamma_q(a, x);
        const double p = boost::math::gamma_p(a, x);
        REQUIRE(std::fabs(regularized_gamma_q(a, x) - q) <= 1e-12 + 1e-10 * q);
        REQUIRE(std::fabs(regularized_gamma_p(a, x) - p) <= 1e-12 + 1e-10 * p);
        REQUIRE(std::fabs(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) - 1.0) < 1e-13);
    }
}

TEST_CASE("sf is monotone in the statistic") {
    for (int k : {1, 3, 7}) {
        double prev = 1.0;
        for (double x = 0.0; x < 100.0; x += 0.25) {
            const double p = chi2_sf(x, k);
            REQUIRE(p <= prev);
            REQUIRE(p >= 0.0);
            prev = p;
        }
    }
}

TEST_CASE("statistic properties") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 2 + gen() % 5;
        std::vector<std::vector<std::int64_t>> counts(rows, std::vector<std::int64_t>(2));
        for (auto& r : counts)
            for (auto& c : r) c = 1 + static_cast<std::int64_t>(gen() % 40);
        const double base = chi_square_statistic(ContingencyTable::from_counts(counts)).statistic;

        // Scaling every count by c scales the statistic by c.
        auto scaled = counts;
        for (auto& r : scaled)
            for (auto& c : r) c *= 3;
        CHECK(chi_square_statistic(ContingencyTable::from_counts(scaled)).statistic ==
              doctest::Approx(3.0 * base).epsilon(1e-10));

        // Row order does not matter.
        auto permuted = counts;
        std::shuffle(permuted.begin(), permuted.end(), gen);
        CHECK(chi_square_statistic(ContingencyTable::from_counts(permuted)).statistic ==
              doctest::Approx(base).epsilon(1e-12));
        CHECK(base >= 0.0);
    }
}

namespace {

FittedEncoder numeric_encoder(const std::vector<std::string>& names, std::vector<double> edges) {
    FittedEncoder enc;
    for (const auto& n : names) {
        ColumnEncoding c;
        c.name = n;
        c.kind = ColumnKind::numeric;
        c.bin_edges = edges;
        enc.columns.push_back(c);
    }
    return enc;
}

}  // namespace

TEST_CASE("select_features keeps the dependent feature") {
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    std::mt19937_64 gen(9);
    for (int i = 0; i < 400; ++i) {
        const int label = i % 2;
        const double signal = label + 0.3 * std::normal_distribution<double>()(gen);
        const double noise = std::normal_distribution<double>()(gen);
        rows.push_back({noise, signal, 1.0});
        y.push_back(label);
    }
    const auto set = testsupport::make_set(rows, y);
    auto enc = numeric_encoder({"f0", "f1", "f2"}, {-0.5, 0.0, 0.5});
    const auto sel = select_features(set, enc, 0.05);
    REQUIRE(sel.results.size() == 3);
    CHECK(sel.results.front().feature_name == "f1");
    CHECK(sel.results.front().kept);
    // Constant column: single level, reported with p = 1.
    const auto& last = sel.results.back();
    CHECK(last.feature_name == "f2");
    CHECK(last.degenerate);
    CHECK(last.p_value == 1.0);
    CHECK_FALSE(last.kept);
    CHECK(std::find(sel.kept.begin(), sel.kept.end(), "f1") != sel.kept.end());

    const std::string csv = selection_csv(sel);
    CHECK(csv.rfind("feature,statistic,dof,p_value,kept\n", 0) == 0);
    CHECK(selection_svg(sel, 0.05).find("</svg>") != std::string::npos);
}

TEST_CASE("select_features with nothing significant") {
    const auto set = testsupport::make_set({{1}, {1}, {1}, {1}}, {0, 1, 0, 1});
    auto enc = numeric_encoder({"f0"}, {});
    CHECK_THROWS_AS(select_features(set, enc, 0.05), SelectionError);
}
