#include "sixport/network.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "sixport/probability.hpp"
#include "sixport/rng.hpp"

namespace sixport {

namespace {

constexpr int kMain = 0;
constexpr int kLeak = 1;

inline std::size_t mode(int rail, int channel) {
    return static_cast<std::size_t>(rail * 2 + channel);
}

double coupler_angle(const NetworkSpec::Element& el, double t) {
    if (el.epsilon == 0.0) return 0.0;
    return el.timed ? el.epsilon * std::cos(el.omega * t) : std::asin(el.epsilon);
}

void apply_element(const NetworkSpec::Element& el, double t, AmplitudeState& state,
                   bool adjoint) {
    using Kind = NetworkSpec::ElementKind;
    switch (el.kind) {
        case Kind::Splitter: {
            // per channel: a' = t a - r b, b' = r a + t b
            for (int ch : {kMain, kLeak}) {
                auto& a = state.amp[mode(el.rail_a, ch)];
                auto& b = state.amp[mode(el.rail_b, ch)];
                const auto a0 = a;
                const auto b0 = b;
                if (!adjoint) {
                    a = el.t * a0 - el.r * b0;
                    b = el.r * a0 + el.t * b0;
                } else {
                    a = el.t * a0 + el.r * b0;
                    b = -el.r * a0 + el.t * b0;
                }
            }
            break;
        }
        case Kind::Coupler: {
            const double theta = coupler_angle(el, t);
            const double c = std::cos(theta);
            const double s = std::sin(theta);
            auto& main = state.amp[mode(el.rail, kMain)];
            auto& leak = state.amp[mode(el.rail, kLeak)];
            const auto m0 = main;
            const auto l0 = leak;
            if (!adjoint) {
                main = c * m0 - s * l0;
                leak = s * m0 + c * l0;
            } else {
                main = c * m0 + s * l0;
                leak = -s * m0 + c * l0;
            }
            break;
        }
        case Kind::PhaseShifter: {
            const double phase = adjoint ? -el.phase : el.phase;
            state.amp[mode(el.rail, kLeak)] *= std::polar(1.0, phase);
            break;
        }
        case Kind::Mixer: {
            // main' = (main - leak)/sqrt(2), leak' = (main + leak)/sqrt(2)
            const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
            auto& main = state.amp[mode(el.rail, kMain)];
            auto& leak = state.amp[mode(el.rail, kLeak)];
            const auto m0 = main;
            const auto l0 = leak;
            if (!adjoint) {
                main = inv_sqrt2 * (m0 - l0);
                leak = inv_sqrt2 * (m0 + l0);
            } else {
                main = inv_sqrt2 * (m0 + l0);
                leak = inv_sqrt2 * (l0 - m0);
            }
            break;
        }
    }
}

AmplitudeState propagate_range(const NetworkSpec& net, double t, std::size_t first,
                               std::size_t last, AmplitudeState state) {
    for (std::size_t i = first; i < last; ++i)
        apply_element(net.elements[i], t, state, false);
    return state;
}

AmplitudeState back_propagate_to(const NetworkSpec& net, double t, std::size_t plane,
                                 AmplitudeState state) {
    for (std::size_t i = net.elements.size(); i > plane; --i)
        apply_element(net.elements[i - 1], t, state, true);
    return state;
}

AmplitudeState source_state(const NetworkSpec& net) {
    AmplitudeState state;
    state.amp[mode(net.source_rail, kMain)] = 1.0;
    return state;
}

double rail_norm_sq(const AmplitudeState& state, int rail) {
    return std::norm(state.amp[mode(rail, kMain)]) + std::norm(state.amp[mode(rail, kLeak)]);
}

int rail_of_plane(Location site) {
    switch (site) {
        case Location::L1: return 1;
        case Location::L2: return 0;
        case Location::L3: return 1;
        case Location::L4: return 2;
        case Location::L5: return 1;
    }
    return 1;
}

struct Layout {
    std::vector<NetworkSpec::Element> elements;
    std::array<int, 5> location_plane{};
};

// Shared construction of the nested two-mode loop. Splitting amplitudes:
// outer 2/3:1/3 toward the loop, inner 50/50, recombination tilted by the
// imbalance delta ((p-q)^2 = 2*delta), detected-arm recombiner -sqrt(2/3)
// against +sqrt(1/3). These are the unique (up to gauge) values meeting the
// zero-coupling contract checked in validate_matching_contract().
Layout make_layout(const std::array<double, 5>& coupler_eps, const std::array<double, 5>& omegas,
                   bool timed, bool eta_present, double delta) {
    using Kind = NetworkSpec::ElementKind;
    Layout layout;
    const double t23 = std::sqrt(2.0 / 3.0);
    const double t13 = std::sqrt(1.0 / 3.0);
    const double a = std::sqrt(2.0 * delta);
    const double bq = std::sqrt(2.0 - 2.0 * delta);
    const double p_split = 0.5 * (a + bq);
    const double q_split = 0.5 * (bq - a);
    auto coupler = [&](int rail, Location site) {
        NetworkSpec::Element el;
        el.kind = Kind::Coupler;
        el.rail = rail;
        el.site = site;
        el.timed = timed;
        el.epsilon = coupler_eps[static_cast<std::size_t>(static_cast<int>(site) - 1)];
        el.omega = omegas[static_cast<std::size_t>(static_cast<int>(site) - 1)];
        return el;
    };
    auto splitter = [&](int rail_a, int rail_b, double t, double r) {
        NetworkSpec::Element el;
        el.kind = Kind::Splitter;
        el.rail_a = rail_a;
        el.rail_b = rail_b;
        el.t = t;
        el.r = r;
        return el;
    };

    auto& e = layout.elements;
    e.push_back(splitter(1, 0, t23, t13));                    // source -> loop arm + solo arm
    layout.location_plane[0] = static_cast<int>(e.size());    // L1 (projector commutes with its coupler)
    e.push_back(coupler(1, Location::L1));
    e.push_back(splitter(1, 2, std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0));
    layout.location_plane[1] = static_cast<int>(e.size());
    e.push_back(coupler(0, Location::L2));
    layout.location_plane[2] = static_cast<int>(e.size());
    e.push_back(coupler(1, Location::L3));
    layout.location_plane[3] = static_cast<int>(e.size());
    e.push_back(coupler(2, Location::L4));
    if (eta_present) {
        NetworkSpec::Element eta;
        eta.kind = Kind::PhaseShifter;
        eta.rail = 2;
        eta.phase = std::numbers::pi;
        e.push_back(eta);
    }
    e.push_back(splitter(1, 2, p_split, q_split));            // loop recombiner (imbalance delta)
    layout.location_plane[4] = static_cast<int>(e.size());    // L5
    e.push_back(coupler(1, Location::L5));
    e.push_back(splitter(1, 0, -t23, -t13));                  // detected-arm recombiner
    NetworkSpec::Element mixer;
    mixer.kind = Kind::Mixer;
    mixer.rail = 1;
    e.push_back(mixer);
    return layout;
}

void validate_matching_contract();

NetworkSpec finish_network(Layout layout, bool eta_present, double delta) {
    NetworkSpec net;
    net.elements = std::move(layout.elements);
    net.location_plane = layout.location_plane;
    net.eta_present = eta_present;
    net.delta = delta;
    validate_matching_contract();
    return net;
}

}  // namespace

double AmplitudeState::norm_sq() const {
    double sum = 0.0;
    for (const auto& a : amp) sum += std::norm(a);
    return sum;
}

NetworkSpec build_network(const ExperimentParams& params) {
    return build_network(params, {true, true, true, true, true});
}

NetworkSpec build_network(const ExperimentParams& params, const std::array<bool, 5>& site_active) {
    params.validate();
    std::array<double, 5> eps{};
    for (std::size_t i = 0; i < 5; ++i) eps[i] = site_active[i] ? params.epsilon : 0.0;
    return finish_network(make_layout(eps, params.omegas, true, params.eta_present, 0.0),
                          params.eta_present, 0.0);
}

NetworkSpec build_simplified_network(double epsilon, Location site, bool eta, double delta,
                                     bool disturbed) {
    if (!(epsilon >= 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must satisfy 0 <= epsilon < 1");
    if (!(delta >= 0.0) || delta > 0.5) throw std::invalid_argument("delta must lie in [0, 0.5]");
    std::array<double, 5> eps{};
    if (disturbed) eps[static_cast<std::size_t>(static_cast<int>(site) - 1)] = epsilon;
    return finish_network(make_layout(eps, {0, 0, 0, 0, 0}, false, eta, delta), eta, delta);
}

AmplitudeState propagate(const NetworkSpec& net, double t) {
    return propagate_range(net, t, 0, net.elements.size(), source_state(net));
}

double exact_p_detect(const NetworkSpec& net, double t) {
    const AmplitudeState out = propagate(net, t);
    return std::norm(out.amp[mode(net.detector_rail, kMain)]);
}

ConditionalDetect conditional_p_detect(const NetworkSpec& net, double t, Location site,
                                       bool place_in_main) {
    const std::size_t plane =
        static_cast<std::size_t>(net.location_plane[static_cast<std::size_t>(
            static_cast<int>(site) - 1)]);
    const int rail = rail_of_plane(site);
    AmplitudeState state = propagate_range(net, t, 0, plane, source_state(net));
    ConditionalDetect result;
    if (place_in_main) {
        state = AmplitudeState{};
        state.amp[mode(rail, kMain)] = 1.0;
        result.conditioning_norm_sq = 1.0;
    } else {
        const double w = rail_norm_sq(state, rail);
        result.conditioning_norm_sq = w;
        if (w == 0.0) {
            result.zero_conditioning = true;
            return result;
        }
        AmplitudeState projected;
        const double scale = 1.0 / std::sqrt(w);
        projected.amp[mode(rail, kMain)] = state.amp[mode(rail, kMain)] * scale;
        projected.amp[mode(rail, kLeak)] = state.amp[mode(rail, kLeak)] * scale;
        state = projected;
    }
    state = propagate_range(net, t, plane, net.elements.size(), state);
    result.probability = std::norm(state.amp[mode(net.detector_rail, kMain)]);
    if (result.probability == 0.0) result.zero_conditioning = true;
    return result;
}

namespace {

std::size_t slice_plane(const NetworkSpec& net, Slice slice) {
    switch (slice) {
        case Slice::Outer:
            return static_cast<std::size_t>(net.location_plane[0]) + 1;  // past the L1 coupler
        case Slice::Inner:
            // past the L4 coupler and the eta shifter when present
            return static_cast<std::size_t>(net.location_plane[3]) + (net.eta_present ? 2 : 1);
        case Slice::Late:
            return static_cast<std::size_t>(net.location_plane[4]) + 1;  // past the L5 coupler
    }
    throw std::logic_error("unknown slice");
}

}  // namespace

SliceWeakValues weak_values(const NetworkSpec& net, double t, Slice slice,
                            std::optional<Location> condition_at) {
    const std::size_t plane = slice_plane(net, slice);
    AmplitudeState fwd = source_state(net);
    std::size_t fwd_from = 0;
    if (condition_at) {
        const std::size_t cond_plane =
            static_cast<std::size_t>(net.location_plane[static_cast<std::size_t>(
                static_cast<int>(*condition_at) - 1)]);
        if (cond_plane > plane)
            throw std::invalid_argument("conditioning site lies downstream of the slice");
        const int rail = rail_of_plane(*condition_at);
        fwd = propagate_range(net, t, 0, cond_plane, fwd);
        const double w = rail_norm_sq(fwd, rail);
        if (w == 0.0) throw std::invalid_argument("conditioning on an empty arm");
        AmplitudeState projected;
        const double scale = 1.0 / std::sqrt(w);
        projected.amp[mode(rail, kMain)] = fwd.amp[mode(rail, kMain)] * scale;
        projected.amp[mode(rail, kLeak)] = fwd.amp[mode(rail, kLeak)] * scale;
        fwd = projected;
        fwd_from = cond_plane;
    }
    fwd = propagate_range(net, t, fwd_from, plane, fwd);

    AmplitudeState back;
    back.amp[mode(net.detector_rail, kMain)] = 1.0;
    back = back_propagate_to(net, t, plane, back);

    SliceWeakValues result;
    std::complex<double> overlap = 0.0;
    std::array<std::complex<double>, 3> partial{};
    for (int rail = 0; rail < 3; ++rail) {
        for (int ch : {kMain, kLeak})
            partial[static_cast<std::size_t>(rail)] +=
                std::conj(back.amp[mode(rail, ch)]) * fwd.amp[mode(rail, ch)];
        overlap += partial[static_cast<std::size_t>(rail)];
    }
    result.overlap = overlap;
    if (std::abs(overlap) == 0.0) {
        result.divergent = true;
        return result;
    }
    for (std::size_t rail = 0; rail < 3; ++rail) result.by_rail[rail] = partial[rail] / overlap;
    return result;
}

std::complex<double> weak_value(const NetworkSpec& net, double t, Slice slice, Location site,
                                std::optional<Location> condition_at) {
    int rail = -1;
    switch (slice) {
        case Slice::Outer:
            if (site == Location::L1) rail = 1;
            if (site == Location::L2) rail = 0;
            break;
        case Slice::Inner:
            if (site == Location::L2) rail = 0;
            if (site == Location::L3) rail = 1;
            if (site == Location::L4) rail = 2;
            break;
        case Slice::Late:
            if (site == Location::L2) rail = 0;
            if (site == Location::L5) rail = 1;
            break;
    }
    if (rail < 0)
        throw std::invalid_argument("location " + to_string(site) + " does not cross this slice");
    const SliceWeakValues values = weak_values(net, t, slice, condition_at);
    if (values.divergent)
        throw std::runtime_error("weak value diverges: forward/backward overlap is zero");
    return values.by_rail[static_cast<std::size_t>(rail)];
}

namespace {

// The behavioral contract the splitting ratios were solved from: with all
// couplers off, the detected-port probability is 1/18 and the conditioned
// quiet-window probabilities over L1..L5 are 0, 1/6, 1/6, 1/6, 1/3.
void validate_matching_contract() {
    static const bool ok = [] {
        NetworkSpec net = [] {
            NetworkSpec n;
            Layout layout = make_layout({0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, false, true, 0.0);
            n.elements = std::move(layout.elements);
            n.location_plane = layout.location_plane;
            n.eta_present = true;
            return n;
        }();
        if (std::fabs(exact_p_detect(net, 0.0) - 1.0 / 18.0) > 1e-12) return false;
        const std::array<double, 5> quiet = {0.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0};
        for (int i = 0; i < 5; ++i) {
            const auto site = static_cast<Location>(i + 1);
            const auto cond = conditional_p_detect(net, 0.0, site, site == Location::L5);
            if (std::fabs(cond.probability - quiet[static_cast<std::size_t>(i)]) > 1e-12)
                return false;
        }
        return true;
    }();
    if (!ok)
        throw std::logic_error(
            "network construction violates the zero-coupling matching contract");
}

}  // namespace

ExpansionCheck verify_expansion(const std::string& formula_id, int order,
                                const std::vector<double>& eps_grid,
                                const std::vector<double>& t_samples,
                                const std::function<double(double, double)>& exact_fn,
                                const std::function<double(double, double)>& formula_fn) {
    if (eps_grid.size() < 2) throw std::invalid_argument("eps grid needs at least two points");
    ExpansionCheck check;
    check.formula_id = formula_id;
    check.order = order;
    std::vector<double> residuals;
    residuals.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        double worst = 0.0;
        double worst_t = t_samples.empty() ? 0.0 : t_samples.front();
        for (double t : t_samples) {
            const double r = std::fabs(exact_fn(eps, t) - formula_fn(eps, t));
            if (r > worst) {
                worst = r;
                worst_t = t;
            }
        }
        residuals.push_back(worst);
        if (worst > check.max_residual) {
            check.max_residual = worst;
            check.worst_epsilon = eps;
            check.worst_t = worst_t;
        }
    }
    if (check.max_residual < 1e-14) {
        check.exact = true;
        check.pass = true;
        check.slope = std::numeric_limits<double>::infinity();
        return check;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(eps_grid.size());
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const double x = std::log10(eps_grid[i]);
        const double y = std::log10(std::max(residuals[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    check.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    check.pass = check.slope >= static_cast<double>(order) - 0.2;
    return check;
}

namespace {

ExperimentParams params_with_epsilon(double eps, bool eta = true, bool third = false) {
    ExperimentParams p;
    p.epsilon = eps;
    p.eta_present = eta;
    p.third_order = third;
    return p;
}

std::vector<double> default_t_samples() {
    std::vector<double> t;
    for (int i = 0; i < 13; ++i) t.push_back(0.003 + 0.035 * i);
    return t;
}

double powfit_slope(const std::vector<double>& eps_grid, const std::vector<double>& values) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(eps_grid.size());
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const double x = std::log10(eps_grid[i]);
        const double y = std::log10(std::max(values[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

VerificationReport run_verification_suite() {
    VerificationReport report;
    const std::vector<double> eps_grid = {1e-2, 1e-3, 1e-4};
    const std::vector<double> ts = default_t_samples();
    auto add = [&](ExpansionCheck check) { report.expansions.push_back(std::move(check)); };

    add(verify_expansion(
        "plain_eta", 2, eps_grid, ts,
        [](double e, double t) { return exact_p_detect(build_network(params_with_epsilon(e)), t); },
        [](double e, double t) { return p_detect_plain(params_with_epsilon(e), t); }));
    add(verify_expansion(
        "given_l1_leading", 3, eps_grid, ts,
        [](double e, double t) {
            return conditional_p_detect(build_network(params_with_epsilon(e)), t, Location::L1)
                .probability;
        },
        [](double e, double t) { return p_detect_given_l1(params_with_epsilon(e), t); }));
    add(verify_expansion(
        "given_l1_next_order", 4, eps_grid, ts,
        [](double e, double t) {
            return conditional_p_detect(build_network(params_with_epsilon(e, true, true)), t,
                                        Location::L1)
                .probability;
        },
        [](double e, double t) { return p_detect_given_l1(params_with_epsilon(e, true, true), t); }));
    add(verify_expansion(
        "given_l4", 2, eps_grid, ts,
        [](double e, double t) {
            return conditional_p_detect(build_network(params_with_epsilon(e)), t, Location::L4)
                .probability;
        },
        [](double e, double t) { return p_detect_given_l4(params_with_epsilon(e), t); }));

    const std::vector<double> t0 = {0.0};
    for (int i = 1; i <= 5; ++i) {
        const auto site = static_cast<Location>(i);
        for (bool eta : {true, false}) {
            const std::string tag = to_string(site) + (eta ? "" : "_noeta");
            add(verify_expansion(
                "two_window_plain_" + tag, 2, eps_grid, t0,
                [site, eta](double e, double) {
                    return exact_p_detect(build_simplified_network(e, site, eta, 0.0, true), 0.0);
                },
                [site, eta](double e, double) {
                    return simplified_probs(e, ModelKind::simplified_plain(site, eta)).disturbed;
                }));
        }
        add(verify_expansion(
            "two_window_localized_" + to_string(site), 2, eps_grid, t0,
            [site](double e, double) {
                return conditional_p_detect(build_simplified_network(e, site, true, 0.0, true),
                                            0.0, site, site == Location::L5)
                    .probability;
            },
            [site](double e, double) {
                return simplified_probs(e, ModelKind::simplified_localized(site, true)).disturbed;
            }));
        add(verify_expansion(
            "two_window_localized_quiet_" + to_string(site), 2, eps_grid, t0,
            [site](double e, double) {
                return conditional_p_detect(build_simplified_network(e, site, true, 0.0, false),
                                            0.0, site, site == Location::L5)
                    .probability;
            },
            [site](double e, double) {
                return simplified_probs(e, ModelKind::simplified_localized(site, true)).quiet;
            }));
    }
    add(verify_expansion(
        "two_window_plain_quiet", 2, eps_grid, t0,
        [](double e, double) {
            return exact_p_detect(build_simplified_network(e, Location::L1, true, 0.0, false), 0.0);
        },
        [](double, double) { return 1.0 / 18.0; }));

    // Localized rows with eta removed: the L1 entries carry the inner-loop
    // imbalance, the rest are checked at delta = 0.
    const double delta = 1e-2;
    add(verify_expansion(
        "two_window_localized_noeta_L1_delta", 2, eps_grid, t0,
        [delta](double e, double) {
            return conditional_p_detect(build_simplified_network(e, Location::L1, false, delta, true),
                                        0.0, Location::L1)
                .probability;
        },
        [delta](double e, double) {
            return simplified_probs(e, ModelKind::simplified_localized(Location::L1, false, delta))
                .disturbed;
        }));
    add(verify_expansion(
        "two_window_localized_noeta_quiet_L1_delta", 2, eps_grid, t0,
        [delta](double e, double) {
            return conditional_p_detect(
                       build_simplified_network(e, Location::L1, false, delta, false), 0.0,
                       Location::L1)
                .probability;
        },
        [delta](double e, double) {
            return simplified_probs(e, ModelKind::simplified_localized(Location::L1, false, delta))
                .quiet;
        }));
    for (int i = 2; i <= 5; ++i) {
        const auto site = static_cast<Location>(i);
        add(verify_expansion(
            "two_window_localized_noeta_" + to_string(site), 2, eps_grid, t0,
            [site](double e, double) {
                return conditional_p_detect(build_simplified_network(e, site, false, 0.0, true),
                                            0.0, site, site == Location::L5)
                    .probability;
            },
            [site](double e, double) {
                return simplified_probs(e, ModelKind::simplified_localized(site, false)).disturbed;
            }));
    }

    // Weak-value checks.
    auto& wv = report.weak_values;
    {
        std::vector<double> mags;
        for (double e : eps_grid) {
            const NetworkSpec net = build_network(params_with_epsilon(e));
            mags.push_back(std::abs(weak_value(net, 0.0, Slice::Outer, Location::L1)));
        }
        wv.l1_order_slope = powfit_slope(eps_grid, mags);

        const NetworkSpec net = build_network(params_with_epsilon(1e-2));
        double worst = 0.0;
        for (double t : ts) {
            for (Slice slice : {Slice::Outer, Slice::Inner, Slice::Late}) {
                const SliceWeakValues values = weak_values(net, t, slice);
                const std::complex<double> sum =
                    values.by_rail[0] + values.by_rail[1] + values.by_rail[2];
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
        wv.completeness_error = worst;
        wv.anomalous_l3 =
            std::abs(weak_value(net, 0.0, Slice::Inner, Location::L3, Location::L1));
        wv.anomalous_l4 =
            std::abs(weak_value(net, 0.0, Slice::Inner, Location::L4, Location::L1));

        // First-order sensitivity of the detected port to the L1 coupler:
        // finite difference between all-sites-on and L1-frozen networks.
        auto response = [&](double e, bool eta) {
            const NetworkSpec on = build_network(params_with_epsilon(e, eta));
            const NetworkSpec off =
                build_network(params_with_epsilon(e, eta), {false, true, true, true, true});
            double best = 0.0;
            for (double t : ts)
                best = std::max(best, std::fabs(exact_p_detect(on, t) - exact_p_detect(off, t)));
            return best;
        };
        std::vector<double> with_eta, without_eta;
        for (double e : eps_grid) {
            with_eta.push_back(response(e, true));
            without_eta.push_back(response(e, false));
        }
        wv.eta_l1_slope = powfit_slope(eps_grid, with_eta);
        wv.noeta_l1_slope = powfit_slope(eps_grid, without_eta);
        // the eta-removed response is analytically quadratic; fitted slopes
        // carry the usual order - 0.2 allowance
        wv.pass = std::fabs(wv.l1_order_slope - 1.0) <= 0.1 && wv.completeness_error < 1e-10 &&
                  wv.anomalous_l3 > 1.0 && wv.anomalous_l4 > 1.0 && wv.noeta_l1_slope >= 1.8 &&
                  wv.eta_l1_slope <= 1.2;
    }

    // Unitarity over random (epsilon, t) pairs.
    {
        PhiloxStream rng(0x5eed, 0, 0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double eps = 0.1 * rng.next_double();
            const double t = rng.next_double();
            const NetworkSpec net = build_network(params_with_epsilon(eps));
            worst = std::max(worst, std::fabs(propagate(net, t).norm_sq() - 1.0));
        }
        report.max_unitarity_violation = worst;
        report.unitary_ok = worst < 1e-12;
    }

    report.all_pass = report.unitary_ok && report.weak_values.pass;
    for (const auto& check : report.expansions) report.all_pass &= check.pass;
    return report;
}

std::string to_json_string(const NetworkSpec& net) {
    nlohmann::ordered_json j;
    j["eta_present"] = net.eta_present;
    j["delta"] = net.delta;
    j["source"] = {{"rail", net.source_rail}, {"channel", "main"}};
    j["detector"] = {{"rail", net.detector_rail}, {"channel", "main"}};
    auto& elements = j["elements"];
    elements = nlohmann::ordered_json::array();
    for (const auto& el : net.elements) {
        nlohmann::ordered_json je;
        switch (el.kind) {
            case NetworkSpec::ElementKind::Splitter:
                je["kind"] = "splitter";
                je["rails"] = {el.rail_a, el.rail_b};
                je["t"] = el.t;
                je["r"] = el.r;
                break;
            case NetworkSpec::ElementKind::Coupler:
                je["kind"] = "coupler";
                je["rail"] = el.rail;
                je["site"] = to_string(el.site);
                je["timed"] = el.timed;
                je["epsilon"] = el.epsilon;
                if (el.timed) je["omega"] = el.omega;
                break;
            case NetworkSpec::ElementKind::PhaseShifter:
                je["kind"] = "phase";
                je["rail"] = el.rail;
                je["phase"] = el.phase;
                break;
            case NetworkSpec::ElementKind::Mixer:
                je["kind"] = "mixer";
                je["rail"] = el.rail;
                break;
        }
        elements.push_back(std::move(je));
    }
    return j.dump(2) + "\n";
}

std::string to_json_string(const VerificationReport& report) {
    nlohmann::ordered_json j;
    j["all_pass"] = report.all_pass;
    j["unitarity"] = {{"ok", report.unitary_ok},
                      {"max_violation", report.max_unitarity_violation}};
    auto& checks = j["expansions"];
    checks = nlohmann::ordered_json::array();
    for (const auto& check : report.expansions) {
        checks.push_back({{"formula", check.formula_id},
                          {"order", check.order},
                          {"slope", check.exact ? nlohmann::json("exact") : nlohmann::json(check.slope)},
                          {"max_residual", check.max_residual},
                          {"worst_epsilon", check.worst_epsilon},
                          {"worst_t", check.worst_t},
                          {"pass", check.pass}});
    }
    j["weak_values"] = {{"l1_order_slope", report.weak_values.l1_order_slope},
                        {"completeness_error", report.weak_values.completeness_error},
                        {"anomalous_l3", report.weak_values.anomalous_l3},
                        {"anomalous_l4", report.weak_values.anomalous_l4},
                        {"eta_l1_slope", report.weak_values.eta_l1_slope},
                        {"noeta_l1_slope", report.weak_values.noeta_l1_slope},
                        {"pass", report.weak_values.pass}};
    return j.dump(2) + "\n";
}

}  // namespace sixport
