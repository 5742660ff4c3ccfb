// Test helpers: independent oracles and small fixtures shared by the unit
// tests and the acceptance runner.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "stackline/frame.hpp"
#include "stackline/learners.hpp"
#include "stackline/metrics.hpp"

namespace testsupport {

namespace fs = std::filesystem;

/// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("stackline_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

// ---------------------------------------------------------------------------
// Metric oracles, recomputed straight from the label and prediction vectors.

struct BruteScores {
    double accuracy = 0;
    double precision[2] = {0, 0};
    double recall[2] = {0, 0};
    double f1[2] = {0, 0};
    double support[2] = {0, 0};
};

inline BruteScores brute_scores(const std::vector<int>& y, const std::vector<int>& pred) {
    BruteScores s;
    const std::size_t n = y.size();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) correct += y[i] == pred[i];
    s.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    for (int c = 0; c < 2; ++c) {
        std::int64_t hit = 0, predicted = 0, actual = 0;
        for (std::size_t i = 0; i < n; ++i) {
            hit += (pred[i] == c && y[i] == c);
            predicted += pred[i] == c;
            actual += y[i] == c;
        }
        const double p = predicted == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(predicted);
        const double r = actual == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(actual);
        s.precision[c] = p;
        s.recall[c] = r;
        s.f1[c] = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
        s.support[c] = static_cast<double>(actual);
    }
    return s;
}

inline double macro(const double v[2]) { return 0.5 * (v[1] + v[0]); }

inline double weighted(const double v[2], const double support[2]) {
    return (support[1] * v[1] + support[0] * v[0]) / (support[0] + support[1]);
}

/// Probability that a random positive outscores a random negative, ties half.
inline double pairwise_auc(const std::vector<int>& y, const std::vector<double>& p) {
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0) continue;
            pairs += 1.0;
            if (p[i] > p[j]) wins += 1.0;
            else if (p[i] == p[j]) wins += 0.5;
        }
    }
    return wins / pairs;
}

// ---------------------------------------------------------------------------
// Chi-square tail by adaptive Simpson quadrature of the density.

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                      double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

/// Upper tail of the chi-square law with k degrees of freedom. Integrates in
/// u = sqrt(t), where the density becomes u^(k-1) exp(-u^2/2) / (2^(k/2-1) G(k/2)),
/// smooth even for k = 1. The range is cut into unit panels so the adaptive
/// rule cannot miss the mode.
inline double chi2_sf_quadrature(double x, int k) {
    const double log_norm = (k / 2.0 - 1.0) * std::log(2.0) + std::lgamma(k / 2.0);
    auto g = [&](double u) {
        if (u <= 0.0) return k == 1 ? std::exp(-log_norm) : 0.0;
        return std::exp((k - 1) * std::log(u) - 0.5 * u * u - log_norm);
    };
    const double lo = std::sqrt(x);
    const double hi = std::max(lo, std::sqrt(static_cast<double>(k))) + 40.0;
    double total = 0.0;
    for (double a = lo; a < hi; a += 1.0) total += adaptive_simpson(g, a, std::min(a + 1.0, hi), 1e-14);
    return total;
}

// ---------------------------------------------------------------------------
// Fixtures

/// Two Gaussian classes with means -sep/2 and +sep/2 on every feature.
inline stackline::LabeledSet gaussian_set(std::size_t n, std::size_t d, double sep, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    stackline::Matrix x(n, d);
    std::vector<int> y(n);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<int>(i % 2);
        const double mean = y[i] == 1 ? sep / 2.0 : -sep / 2.0;
        for (std::size_t j = 0; j < d; ++j) x(i, j) = mean + z(gen);
    }
    return {std::move(x), std::move(y), std::move(names)};
}

inline stackline::LabeledSet make_set(const std::vector<std::vector<double>>& rows, std::vector<int> y) {
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    stackline::Matrix x(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) x(i, j) = rows[i][j];
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
    return {std::move(x), std::move(y), std::move(names)};
}

inline double accuracy_of(const stackline::Learner& model, const stackline::LabeledSet& data) {
    const auto pred = model.predict(data.features);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == data.labels[i];
    return static_cast<double>(hit) / static_cast<double>(pred.size());
}

/// Largest relative error between an analytic gradient and central differences.
inline double gradient_check(const std::function<double(const std::vector<double>&)>& loss,
                             const std::vector<double>& at, const std::vector<double>& analytic,
                             double h = 1e-5) {
    double worst = 0.0;
    std::vector<double> p = at;
    for (std::size_t i = 0; i < at.size(); ++i) {
        p[i] = at[i] + h;
        const double up = loss(p);
        p[i] = at[i] - h;
        const double down = loss(p);
        p[i] = at[i];
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::fabs(numeric), std::fabs(analytic[i]), 1e-7});
        worst = std::max(worst, std::fabs(numeric - analytic[i]) / denom);
    }
    return worst;
}

}  // namespace testsupport
