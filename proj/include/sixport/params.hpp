#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sixport {

/// Interferometer sites. L1 is the arm feeding the inner loop, L3/L4 the
/// inner arms, L2 the solo outer arm, L5 the recombined arm after the loop.
enum class Location : int { L1 = 1, L2 = 2, L3 = 3, L4 = 4, L5 = 5 };

std::string to_string(Location loc);
Location location_from_string(const std::string& s);

/// Parameters of the modulated six-port experiment.
///
/// Defaults: epsilon = 1e-2, T_s = 1e-3 s, omega_i = (100+10i) 1/s,
/// N_s = 5000 photons per window, 500 windows, eta present.
struct ExperimentParams {
    double epsilon = 1e-2;                 ///< modulation amplitude, [0,1)
    double ts_seconds = 1e-3;              ///< window duration
    std::array<double, 5> omegas = {110.0, 120.0, 130.0, 140.0, 150.0};
    std::int64_t ns = 5000;                ///< photons sent per window
    int n_windows = 500;
    bool eta_present = true;               ///< pi shifter in the inner arm
    bool third_order = false;              ///< include the next-order term in the L1-conditioned law

    double omega(int index) const {        // index in 1..5
        if (index < 1 || index > 5) throw std::out_of_range("omega index must be in 1..5");
        return omegas[static_cast<std::size_t>(index - 1)];
    }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Which detection-probability law generated (or explains) a dataset.
///
/// Timed kinds are functions of the send time t; simplified kinds describe
/// the two-window constant-disturbance variant and carry their own eta flag
/// and, for the localized-at-L1 no-eta case, the inner-loop imbalance delta.
struct ModelKind {
    enum class Family {
        Unconditioned,        ///< plain run, detector-only postselection
        LocalizedL1,          ///< additionally conditioned on presence at L1
        LocalizedL4,          ///< additionally conditioned on presence at L4
        SimplifiedPlain,      ///< two-window, single disturbed site, no conditioning
        SimplifiedLocalized,  ///< two-window, conditioned on presence at the site
    };

    Family family = Family::Unconditioned;
    Location site = Location::L1;   // simplified kinds only
    bool eta = true;                // simplified kinds only; timed kinds read params
    double delta = 0.0;             // SimplifiedLocalized(L1) without eta

    static ModelKind unconditioned() { return {Family::Unconditioned}; }
    static ModelKind localized_l1() { return {Family::LocalizedL1}; }
    static ModelKind localized_l4() { return {Family::LocalizedL4}; }
    static ModelKind simplified_plain(Location site, bool eta = true) {
        return {Family::SimplifiedPlain, site, eta, 0.0};
    }
    static ModelKind simplified_localized(Location site, bool eta = true, double delta = 0.0) {
        return {Family::SimplifiedLocalized, site, eta, delta};
    }

    bool timed() const {
        return family == Family::Unconditioned || family == Family::LocalizedL1 ||
               family == Family::LocalizedL4;
    }

    std::string name() const;
    static ModelKind from_name(const std::string& s);
};

/// JSON document I/O for configs (keys: epsilon, ts_seconds, omegas, ns,
/// windows, eta, third_order, seed). Unknown keys are rejected.
struct RunConfig {
    ExperimentParams params;
    std::uint64_t seed = 1;
};

std::string to_json_string(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);

}  // namespace sixport
