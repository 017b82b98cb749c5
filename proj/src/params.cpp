#include "sixport/params.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace sixport {

std::string to_string(Location loc) {
    return "L" + std::to_string(static_cast<int>(loc));
}

Location location_from_string(const std::string& s) {
    if (s.size() == 2 && (s[0] == 'L' || s[0] == 'l') && s[1] >= '1' && s[1] <= '5')
        return static_cast<Location>(s[1] - '0');
    throw std::invalid_argument("unknown location '" + s + "' (expected L1..L5)");
}

void ExperimentParams::validate() const {
    if (!(epsilon >= 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must satisfy 0 <= epsilon < 1");
    if (!(ts_seconds > 0.0)) throw std::invalid_argument("ts_seconds must be positive");
    std::set<double> seen;
    for (double w : omegas) {
        if (!(w > 0.0)) throw std::invalid_argument("omegas must all be positive");
        if (!seen.insert(w).second)
            throw std::invalid_argument("omegas must be mutually distinct");
    }
    if (ns < 0) throw std::invalid_argument("ns must be non-negative");
    if (n_windows < 1) throw std::invalid_argument("windows must be at least 1");
}

std::string ModelKind::name() const {
    switch (family) {
        case Family::Unconditioned: return "unconditioned";
        case Family::LocalizedL1: return "localized-l1";
        case Family::LocalizedL4: return "localized-l4";
        case Family::SimplifiedPlain:
            return "simplified-" + to_string(site) + (eta ? "" : "-noeta");
        case Family::SimplifiedLocalized:
            return "simplified-localized-" + to_string(site) + (eta ? "" : "-noeta");
    }
    return "unknown";
}

ModelKind ModelKind::from_name(const std::string& s) {
    if (s == "unconditioned") return unconditioned();
    if (s == "localized-l1") return localized_l1();
    if (s == "localized-l4") return localized_l4();
    auto parse_tail = [](std::string tail, bool localized) {
        bool eta = true;
        const std::string noeta = "-noeta";
        if (tail.size() > noeta.size() &&
            tail.compare(tail.size() - noeta.size(), noeta.size(), noeta) == 0) {
            eta = false;
            tail.erase(tail.size() - noeta.size());
        }
        Location site = location_from_string(tail);
        return localized ? simplified_localized(site, eta) : simplified_plain(site, eta);
    };
    const std::string sl = "simplified-localized-";
    const std::string sp = "simplified-";
    if (s.rfind(sl, 0) == 0) return parse_tail(s.substr(sl.size()), true);
    if (s.rfind(sp, 0) == 0) return parse_tail(s.substr(sp.size()), false);
    throw std::invalid_argument("unknown model '" + s + "'");
}

std::string to_json_string(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["epsilon"] = cfg.params.epsilon;
    j["ts_seconds"] = cfg.params.ts_seconds;
    j["omegas"] = cfg.params.omegas;
    j["ns"] = cfg.params.ns;
    j["windows"] = cfg.params.n_windows;
    j["eta"] = cfg.params.eta_present;
    j["third_order"] = cfg.params.third_order;
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    static const std::set<std::string> known = {"epsilon", "ts_seconds", "omegas", "ns",
                                                "windows", "eta", "third_order", "seed"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    RunConfig cfg;
    try {
        if (j.contains("epsilon")) cfg.params.epsilon = j.at("epsilon").get<double>();
        if (j.contains("ts_seconds")) cfg.params.ts_seconds = j.at("ts_seconds").get<double>();
        if (j.contains("omegas")) {
            auto v = j.at("omegas").get<std::vector<double>>();
            if (v.size() != 5)
                throw std::invalid_argument("config: 'omegas' must hold exactly 5 values");
            std::copy(v.begin(), v.end(), cfg.params.omegas.begin());
        }
        if (j.contains("ns")) cfg.params.ns = j.at("ns").get<std::int64_t>();
        if (j.contains("windows")) cfg.params.n_windows = j.at("windows").get<int>();
        if (j.contains("eta")) cfg.params.eta_present = j.at("eta").get<bool>();
        if (j.contains("third_order")) cfg.params.third_order = j.at("third_order").get<bool>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: bad value type: ") + e.what());
    }
    cfg.params.validate();
    return cfg;
}

}  // namespace sixport
