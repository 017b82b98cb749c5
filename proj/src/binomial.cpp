#include "sixport/binomial.hpp"

#include <cmath>
#include <stdexcept>

namespace sixport {

namespace {

// Inverse-transform sampling through the pmf recurrence; cheap and exact
// for n*p up to a few tens.
std::int64_t binv(PhiloxStream& rng, std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = static_cast<double>(n + 1) * s;
    while (true) {
        double r = std::exp(static_cast<double>(n) * std::log1p(-p));  // q^n
        double u = rng.next_double();
        std::int64_t k = 0;
        bool done = false;
        while (k <= n) {
            if (u <= r) {
                done = true;
                break;
            }
            u -= r;
            ++k;
            r *= a / static_cast<double>(k) - s;
        }
        if (done) return k;
        // Floating-point residue pushed u past the accumulated mass; redraw.
    }
}

double log_pmf_ratio_terms(std::int64_t n, std::int64_t x) {
    // lgamma(x+1) + lgamma(n-x+1)
    return std::lgamma(static_cast<double>(x) + 1.0) +
           std::lgamma(static_cast<double>(n - x) + 1.0);
}

// Hormann's transformed rejection (BTRS) with the exact log-pmf acceptance
// test; valid for n*p >= 10, p <= 0.5.
std::int64_t btrs(PhiloxStream& rng, std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double nd = static_cast<double>(n);
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lr = std::log(p / q);
    const std::int64_t m = static_cast<std::int64_t>(std::floor((nd + 1.0) * p));
    const double h_m = log_pmf_ratio_terms(n, m);

    while (true) {
        const double u = rng.next_double() - 0.5;
        const double v = rng.next_double();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0.0 || kd > nd) continue;
        const std::int64_t k = static_cast<std::int64_t>(kd);
        if (us >= 0.07 && v <= vr) return k;
        const double lv = std::log(v * alpha / (a / (us * us) + b));
        if (lv <= h_m - log_pmf_ratio_terms(n, k) + (kd - static_cast<double>(m)) * lr) return k;
    }
}

}  // namespace

std::int64_t binomial_draw(PhiloxStream& rng, std::int64_t n, double p) {
    if (n < 0) throw std::invalid_argument("binomial_draw: n must be non-negative");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_draw: p must be in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flipped = p > 0.5;
    const double ps = flipped ? 1.0 - p : p;
    const std::int64_t k = (static_cast<double>(n) * ps < 10.0) ? binv(rng, n, ps)
                                                                : btrs(rng, n, ps);
    return flipped ? n - k : k;
}

}  // namespace sixport
