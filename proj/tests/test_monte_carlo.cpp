#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sixport/binomial.hpp"
#include "sixport/monte_carlo.hpp"

using namespace sixport;

namespace {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction
// split; test-side oracle for chi-square p-values.
double gammq(double a, double x) {
    REQUIRE(x >= 0.0);
    REQUIRE(a > 0.0);
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

double binom_pmf(std::int64_t n, std::int64_t k, double p) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                    k * std::log(p) + (n - k) * std::log1p(-p));
}

// Chi-square goodness of fit of `draws` against Binomial(n, p); bins pooled
// to an expected count of at least 5. Returns the p-value.
double chi_square_pvalue(const std::vector<std::int64_t>& draws, std::int64_t n, double p) {
    std::int64_t lo = *std::min_element(draws.begin(), draws.end());
    std::int64_t hi = *std::max_element(draws.begin(), draws.end());
    // pad the range a bit so tail mass pools into the edge bins
    lo = std::max<std::int64_t>(0, lo - 2);
    hi = std::min(n, hi + 2);
    const double total = static_cast<double>(draws.size());
    std::vector<double> histogram(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (auto d : draws) histogram[static_cast<std::size_t>(std::clamp(d, lo, hi) - lo)] += 1.0;
    std::vector<double> expected;
    std::vector<double> observed;
    double exp_acc = 0.0, obs_acc = 0.0;
    double below = 0.0;  // model mass below lo
    for (std::int64_t k = 0; k < lo; ++k) below += binom_pmf(n, k, p);
    exp_acc = below * total;
    for (std::int64_t k = lo; k <= hi; ++k) {
        exp_acc += binom_pmf(n, k, p) * total;
        obs_acc += histogram[static_cast<std::size_t>(k - lo)];
        if (exp_acc >= 5.0 && k < hi) {
            expected.push_back(exp_acc);
            observed.push_back(obs_acc);
            exp_acc = obs_acc = 0.0;
        }
    }
    // final bin absorbs the upper tail
    double above = 0.0;
    for (std::int64_t k = hi + 1; k <= n; ++k) {
        const double m = binom_pmf(n, k, p);
        above += m;
        if (m < 1e-18 && above > 0.0) break;
    }
    expected.push_back(exp_acc + above * total);
    observed.push_back(obs_acc);
    REQUIRE(expected.size() >= 3);
    double chi2 = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const double d = observed[i] - expected[i];
        chi2 += d * d / expected[i];
    }
    const double dof = static_cast<double>(expected.size() - 1);
    return gammq(dof / 2.0, chi2 / 2.0);
}

}  // namespace

TEST_CASE("degenerate sampling cases") {
    SUBCASE("ns = 0 gives the all-zero series") {
        ExperimentParams p;
        p.ns = 0;
        const auto series = sample_counts(p, ModelKind::unconditioned(), 1);
        for (auto c : series.counts) CHECK(c == 0);
    }
    SUBCASE("p = 1 pins every draw at ns; p = 0 at zero") {
        const std::vector<double> ones(20, 1.0), zeros(20, 0.0);
        for (auto c : sample_counts_p(ones, 5000, 3)) CHECK(c == 5000);
        for (auto c : sample_counts_p(zeros, 5000, 3)) CHECK(c == 0);
    }
}

TEST_CASE("sampling is reproducible and substreams are independent") {
    ExperimentParams p;
    const auto a = sample_counts(p, ModelKind::unconditioned(), 42);
    const auto b = sample_counts(p, ModelKind::unconditioned(), 42);
    CHECK(a.counts == b.counts);
    const auto c = sample_counts(p, ModelKind::unconditioned(), 43);
    CHECK(a.counts != c.counts);
    const auto d = sample_counts(p, ModelKind::unconditioned(), 42, 1);
    CHECK(a.counts != d.counts);
}

TEST_CASE("window counts stay within [0, ns]") {
    ExperimentParams p;
    const auto series = sample_counts(p, ModelKind::localized_l1(), 7);
    for (auto c : series.counts) {
        CHECK(c >= 0);
        CHECK(c <= p.ns);
    }
}

TEST_CASE("sample mean over 500 windows matches ns/18") {
    ExperimentParams p;
    const auto series = sample_counts(p, ModelKind::unconditioned(), 11);
    const double mean =
        std::accumulate(series.counts.begin(), series.counts.end(), 0.0) / p.n_windows;
    const double pw = 1.0 / 18.0;
    const double sigma = std::sqrt(static_cast<double>(p.ns) * pw * (1.0 - pw));
    CHECK(std::fabs(mean - static_cast<double>(p.ns) / 18.0) <
          3.0 * sigma / std::sqrt(500.0) + 0.5);  // slack for the partial-period modulation drift
}

TEST_CASE("replicate mean of a fixed window converges to ns * p") {
    const std::int64_t ns = 5000;
    const double p = 1.0 / 18.0;
    const int reps = 10000;
    double sum = 0.0;
    for (int r = 0; r < reps; ++r) {
        PhiloxStream rng(99, static_cast<std::uint32_t>(r), 1);
        sum += static_cast<double>(binomial_draw(rng, ns, p));
    }
    const double mean = sum / reps;
    const double se = std::sqrt(ns * p * (1.0 - p) / reps);
    CHECK(std::fabs(mean - ns * p) < 4.0 * se);
}

TEST_CASE("chi-square goodness of fit at the 1e-3 level") {
    SUBCASE("rejection-sampled regime (ns * p large)") {
        const std::int64_t ns = 5000;
        const double p = 1.0 / 18.0;
        std::vector<std::int64_t> draws(100000);
        for (std::size_t r = 0; r < draws.size(); ++r) {
            PhiloxStream rng(1234, static_cast<std::uint32_t>(r), 0);
            draws[r] = binomial_draw(rng, ns, p);
        }
        CHECK(chi_square_pvalue(draws, ns, p) > 1e-3);
    }
    SUBCASE("inversion-sampled regime (ns * p near zero)") {
        const std::int64_t ns = 5000;
        const double p = 1e-4;
        std::vector<std::int64_t> draws(100000);
        for (std::size_t r = 0; r < draws.size(); ++r) {
            PhiloxStream rng(4321, static_cast<std::uint32_t>(r), 0);
            draws[r] = binomial_draw(rng, ns, p);
        }
        CHECK(chi_square_pvalue(draws, ns, p) > 1e-3);
    }
    SUBCASE("flipped regime (p > 1/2)") {
        const std::int64_t ns = 200;
        const double p = 0.83;
        std::vector<std::int64_t> draws(100000);
        for (std::size_t r = 0; r < draws.size(); ++r) {
            PhiloxStream rng(777, static_cast<std::uint32_t>(r), 0);
            draws[r] = binomial_draw(rng, ns, p);
        }
        CHECK(chi_square_pvalue(draws, ns, p) > 1e-3);
    }
}

TEST_CASE("windows are uncorrelated: lag-1 autocorrelation vanishes") {
    ExperimentParams p;
    p.n_windows = 10000;
    const auto series = sample_counts(p, ModelKind::unconditioned(), 5);
    const auto expected = expected_counts(p, ModelKind::unconditioned());
    std::vector<double> resid(series.counts.size());
    for (std::size_t i = 0; i < resid.size(); ++i)
        resid[i] = static_cast<double>(series.counts[i]) - expected[i];
    const double mean = std::accumulate(resid.begin(), resid.end(), 0.0) / resid.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < resid.size(); ++i) {
        const double d = resid[i] - mean;
        den += d * d;
        if (i + 1 < resid.size()) num += d * (resid[i + 1] - mean);
    }
    CHECK(std::fabs(num / den) < 4.0 / std::sqrt(10000.0));
}

TEST_CASE("expected counts") {
    ExperimentParams p;
    SUBCASE("epsilon 0 is flat at ns/18") {
        p.epsilon = 0.0;
        for (double e : expected_counts(p, ModelKind::unconditioned()))
            CHECK(e == doctest::Approx(5000.0 / 18.0).epsilon(1e-14));
    }
    SUBCASE("first window equals ns times the window probability") {
        const auto plain = expected_counts(p, ModelKind::unconditioned());
        CHECK(plain[0] == 5000.0 * p_window(p, 1, ModelKind::unconditioned()));
        const auto loc = expected_counts(p, ModelKind::localized_l1());
        const double t = 0.5 * p.ts_seconds;
        const double s = 2.0 * std::cos(p.omega(1) * t) + std::cos(p.omega(3) * t) +
                         std::cos(p.omega(4) * t);
        CHECK(loc[0] ==
              doctest::Approx(5000.0 * p.epsilon * p.epsilon / 12.0 * s * s).epsilon(1e-12));
    }
}
