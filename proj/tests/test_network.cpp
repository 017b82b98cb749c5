#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sixport/network.hpp"
#include "sixport/probability.hpp"
#include "sixport/rng.hpp"

using namespace sixport;

namespace {

ExperimentParams with_eps(double e, bool eta = true, bool third = false) {
    ExperimentParams p;
    p.epsilon = e;
    p.eta_present = eta;
    p.third_order = third;
    return p;
}

}  // namespace

TEST_CASE("propagation through trivial networks") {
    SUBCASE("no elements: the input comes straight back") {
        NetworkSpec net;
        net.location_plane = {0, 0, 0, 0, 0};
        const AmplitudeState out = propagate(net, 0.0);
        CHECK(out.amp[2] == std::complex<double>(1.0, 0.0));  // rail 1 main
        CHECK(out.norm_sq() == doctest::Approx(1.0));
    }
    SUBCASE("single 50/50 splitter halves the intensity") {
        NetworkSpec net;
        net.location_plane = {0, 0, 0, 0, 0};
        NetworkSpec::Element bs;
        bs.kind = NetworkSpec::ElementKind::Splitter;
        bs.rail_a = 1;
        bs.rail_b = 0;
        bs.t = std::numbers::sqrt2 / 2.0;
        bs.r = std::numbers::sqrt2 / 2.0;
        net.elements.push_back(bs);
        const AmplitudeState out = propagate(net, 0.0);
        CHECK(std::abs(out.amp[2]) == doctest::Approx(1.0 / std::numbers::sqrt2));
        CHECK(std::abs(out.amp[0]) == doctest::Approx(1.0 / std::numbers::sqrt2));
    }
}

TEST_CASE("zero-coupling contract") {
    const NetworkSpec net = build_network(with_eps(0.0));
    SUBCASE("detected-port probability is exactly 1/18") {
        for (double t : {0.0, 0.1, 0.37})
            CHECK(exact_p_detect(net, t) == doctest::Approx(1.0 / 18.0).epsilon(1e-14));
    }
    SUBCASE("quiet conditional values over the five sites") {
        CHECK(conditional_p_detect(net, 0.0, Location::L1).probability ==
              doctest::Approx(0.0));
        CHECK(conditional_p_detect(net, 0.0, Location::L2).probability ==
              doctest::Approx(1.0 / 6.0).epsilon(1e-13));
        CHECK(conditional_p_detect(net, 0.0, Location::L3).probability ==
              doctest::Approx(1.0 / 6.0).epsilon(1e-13));
        CHECK(conditional_p_detect(net, 0.0, Location::L4).probability ==
              doctest::Approx(1.0 / 6.0).epsilon(1e-13));
        CHECK(conditional_p_detect(net, 0.0, Location::L5, true).probability ==
              doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    }
    SUBCASE("conditioning on L1 at zero coupling reports the empty postselected ensemble") {
        const auto cond = conditional_p_detect(net, 0.0, Location::L1);
        CHECK(cond.zero_conditioning);
        CHECK(cond.probability == 0.0);
        CHECK(cond.conditioning_norm_sq == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("the quiet recombined arm is empty, so plain conditioning there is impossible") {
        const auto cond = conditional_p_detect(net, 0.0, Location::L5);
        CHECK(cond.zero_conditioning);
        CHECK(cond.conditioning_norm_sq == doctest::Approx(0.0));
    }
}

TEST_CASE("unitarity of the composed network") {
    PhiloxStream rng(0xfeed, 0, 0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double eps = 0.1 * rng.next_double();
        const double t = rng.next_double();
        const NetworkSpec net = build_network(with_eps(eps));
        worst = std::max(worst, std::fabs(propagate(net, t).norm_sq() - 1.0));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("exact probabilities track the first-order laws") {
    SUBCASE("plain law at t = 0, eps = 1e-2, within O(eps^2)") {
        const double e = 1e-2;
        const double exact = exact_p_detect(build_network(with_eps(e)), 0.0);
        CHECK(std::fabs(exact - p_detect_plain(with_eps(e), 0.0)) < 10.0 * e * e);
    }
    SUBCASE("conditioned L4 at t = 0 within O(eps^2)") {
        const double e = 1e-2;
        const double exact =
            conditional_p_detect(build_network(with_eps(e)), 0.0, Location::L4).probability;
        CHECK(std::fabs(exact - (1.0 + 2.0 * e) / 6.0) < 10.0 * e * e);
    }
    SUBCASE("conditioned L1 at t = 0 within O(eps^3)") {
        const double e = 1e-2;
        const double exact =
            conditional_p_detect(build_network(with_eps(e)), 0.0, Location::L1).probability;
        CHECK(std::fabs(exact - 4.0 * e * e / 3.0) < 10.0 * e * e * e);
    }
    SUBCASE("eta removed: the omega1 sensitivity is gone and omega4 flips sign") {
        // The exact first-order law without eta, derived from the network
        // itself: (1/18)[1 + 2e(-cos w2 t + cos w3 t - cos w4 t)].
        const double e = 1e-3;
        const ExperimentParams p = with_eps(e, false);
        const NetworkSpec net = build_network(p);
        for (double t : {0.05, 0.21, 0.4}) {
            const double first_order =
                (1.0 + 2.0 * e *
                           (-std::cos(p.omega(2) * t) + std::cos(p.omega(3) * t) -
                            std::cos(p.omega(4) * t))) /
                18.0;
            CHECK(std::fabs(exact_p_detect(net, t) - first_order) < 10.0 * e * e);
        }
    }
}

TEST_CASE("residual-order verification suite") {
    const VerificationReport report = run_verification_suite();
    CHECK(report.unitary_ok);
    CHECK(report.all_pass);
    for (const auto& check : report.expansions) {
        CAPTURE(check.formula_id);
        CHECK(check.pass);
        if (!check.exact) CHECK(check.slope >= check.order - 0.2);
    }
    auto find = [&](const std::string& id) -> const ExpansionCheck& {
        for (const auto& check : report.expansions)
            if (check.formula_id == id) return check;
        REQUIRE(false);
        return report.expansions.front();
    };
    CHECK(find("plain_eta").slope == doctest::Approx(2.0).epsilon(0.15));
    CHECK(find("given_l1_next_order").slope >= 3.8);
    // the even-order terms cancel identically in the L4-conditioned law,
    // so its residual runs a full order ahead of the generic bound
    CHECK(find("given_l4").slope >= 2.8);
    CHECK(find("two_window_plain_L5").exact);      // insensitive site: identical by construction
    CHECK(find("two_window_plain_L1_noeta").exact);
    CHECK(find("two_window_localized_quiet_L1").exact);
}

TEST_CASE("weak values") {
    const double e = 1e-2;
    const NetworkSpec net = build_network(with_eps(e));
    SUBCASE("projectors at a slice sum to one") {
        for (Slice slice : {Slice::Outer, Slice::Inner, Slice::Late}) {
            const SliceWeakValues values = weak_values(net, 0.1, slice);
            REQUIRE_FALSE(values.divergent);
            const auto sum = values.by_rail[0] + values.by_rail[1] + values.by_rail[2];
            CHECK(std::abs(sum - 1.0) < 1e-10);
        }
    }
    SUBCASE("presence at L1 is first order in the coupling") {
        std::array<double, 3> eps_grid = {1e-2, 1e-3, 1e-4};
        std::array<double, 3> mags{};
        for (std::size_t i = 0; i < 3; ++i)
            mags[i] = std::abs(
                weak_value(build_network(with_eps(eps_grid[i])), 0.0, Slice::Outer, Location::L1));
        const double slope01 = std::log10(mags[0] / mags[1]);
        const double slope12 = std::log10(mags[1] / mags[2]);
        CHECK(std::fabs(slope01 - 1.0) < 0.1);
        CHECK(std::fabs(slope12 - 1.0) < 0.1);
    }
    SUBCASE("conditioning at L1 amplifies the inner-arm weak values beyond 1") {
        const double l3 = std::abs(weak_value(net, 0.0, Slice::Inner, Location::L3, Location::L1));
        const double l4 = std::abs(weak_value(net, 0.0, Slice::Inner, Location::L4, Location::L1));
        CHECK(l3 > 1.0);
        CHECK(l4 > 1.0);
    }
    SUBCASE("zero forward/backward overlap is reported as divergent") {
        const NetworkSpec quiet = build_network(with_eps(0.0));
        CHECK_THROWS_AS(weak_value(quiet, 0.0, Slice::Inner, Location::L3, Location::L1),
                        std::runtime_error);
    }
    SUBCASE("sites that do not cross a slice are rejected") {
        CHECK_THROWS_AS(weak_value(net, 0.0, Slice::Outer, Location::L3), std::invalid_argument);
    }
}

TEST_CASE("imbalanced inner recombiner realizes the delta laws") {
    const double delta = 1e-3;
    const double e = 1e-2;
    SUBCASE("quiet window: conditioned L1 probability is exactly delta/3") {
        const NetworkSpec net = build_simplified_network(e, Location::L1, false, delta, false);
        CHECK(conditional_p_detect(net, 0.0, Location::L1).probability ==
              doctest::Approx(delta / 3.0).epsilon(1e-12));
    }
    SUBCASE("disturbed window tracks delta(1-2e)/3 to third order in e") {
        const NetworkSpec net = build_simplified_network(e, Location::L1, false, delta, true);
        const double exact = conditional_p_detect(net, 0.0, Location::L1).probability;
        CHECK(std::fabs(exact - delta * (1.0 - 2.0 * e) / 3.0) < delta * e * e * e * 10.0);
    }
}

TEST_CASE("network serialization") {
    const NetworkSpec net = build_network(with_eps(1e-2));
    const std::string json = to_json_string(net);
    CHECK(json.find("\"coupler\"") != std::string::npos);
    CHECK(json.find("\"splitter\"") != std::string::npos);
    CHECK(json.find("\"mixer\"") != std::string::npos);
    CHECK(json.find("\"eta_present\": true") != std::string::npos);
    const NetworkSpec bare = build_network(with_eps(1e-2, false));
    CHECK(to_json_string(bare).find("\"phase\"") == std::string::npos);
}
