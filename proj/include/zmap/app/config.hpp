#pragma once
//
// Run configuration: flat `key = value` lines, `#` comments, dotted section
// prefixes (band.c_H = 0.5). Unknown keys are rejected.
//

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "zmap/band.hpp"
#include "zmap/ergodic.hpp"
#include "zmap/resonance.hpp"
#include "zmap/su_geometry.hpp"

namespace zmap::app {

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Experiment { SpinMap, SpinOsc, BandSweep, BiasSweep };

inline std::string_view experiment_name(Experiment e) {
    switch (e) {
    case Experiment::SpinMap: return "spin-map";
    case Experiment::SpinOsc: return "spin-osc";
    case Experiment::BandSweep: return "band-sweep";
    case Experiment::BiasSweep: return "bias-sweep";
    }
    return "?";
}

/// Accepts both the CLI spelling (spin-map) and the CamelCase one (SpinMap).
inline std::optional<Experiment> parse_experiment(std::string_view s) {
    if (s == "spin-map" || s == "SpinMap") return Experiment::SpinMap;
    if (s == "spin-osc" || s == "SpinOsc") return Experiment::SpinOsc;
    if (s == "band-sweep" || s == "BandSweep") return Experiment::BandSweep;
    if (s == "bias-sweep" || s == "BiasSweep") return Experiment::BiasSweep;
    return std::nullopt;
}

enum class OutputFormat { Csv, Jsonl };

struct RunConfig {
    std::optional<Experiment> experiment;

    // spin-map
    Spin species = Spin::Half;
    std::optional<std::string> channel; // level label; lowest level when unset
    std::vector<PumpingMethod> methods{PumpingMethod::closed(), PumpingMethod::iterated(100)};
    long spin_cycles = 100; // n for every IteratedN method
    double theta_min = 0.02;
    double theta_max = std::numbers::pi;
    int theta_count = 101;
    double phi_min = -std::numbers::pi; // exclusive
    double phi_max = std::numbers::pi;
    int phi_count = 101;
    std::vector<double> theta_list; // overrides the theta range when non-empty
    std::vector<double> phi_list;   // overrides the phi range when non-empty

    // spin-osc
    std::vector<Spin> osc_species{Spin::Half, Spin::One};
    std::vector<double> osc_thetas{1.0, 2.0, 3.0, 3.14};
    double b_bar = 0.01;
    double f0 = 1e7;
    double f_min = 2e6;
    double f_max = 5e7;
    int f_count = 2000;

    // band-sweep / bias-sweep
    BandCycleSpec band;
    TrotterConfig trotter;
    int k_count = 201;
    CycleCount band_cycles = kInfiniteCycles;
    double eps0_min = -1.4;
    double eps0_max = -0.6;
    int eps0_count = 81;

    std::optional<std::string> output_path;
    OutputFormat format = OutputFormat::Csv;
    int workers = 1;
    long seed = 0;

    std::vector<PumpingMethod> resolved_methods() const {
        auto ms = methods;
        for (auto& m : ms)
            if (m.kind == PumpingMethodKind::IteratedN) m.n = spin_cycles;
        return ms;
    }

    int resolved_channel() const { return channel ? level_index(species, *channel) : lowest_level(species); }

    std::vector<double> theta_grid() const {
        return theta_list.empty() ? linspace(theta_min, theta_max, static_cast<std::size_t>(theta_count)) : theta_list;
    }

    /// phi_count points on (phi_min, phi_max], right end included.
    std::vector<double> phi_grid() const {
        if (!phi_list.empty()) return phi_list;
        std::vector<double> v(static_cast<std::size_t>(phi_count));
        for (int j = 0; j < phi_count; ++j) v[j] = phi_min + (phi_max - phi_min) * (j + 1) / phi_count;
        return v;
    }

    ResonanceProposal proposal() const {
        ResonanceProposal p;
        p.b_bar = b_bar;
        p.f0 = f0;
        p.f_grid = ResonanceProposal::log_grid(f_min, f_max, static_cast<std::size_t>(f_count));
        p.theta_list = osc_thetas;
        return p;
    }

    std::vector<double> eps0_grid() const {
        return linspace(eps0_min, eps0_max, static_cast<std::size_t>(eps0_count));
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const auto end = comma == std::string_view::npos ? s.size() : comma;
        auto item = trim(s.substr(pos, end - pos));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace detail

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// Parses key/value text. `source` names the input in error messages.
inline RunConfig parse_config(std::istream& in, const std::string& source = "<config>") {
    RunConfig c;
    std::string line;
    int lineno = 0;
    std::map<std::string, int> seen;

    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;

        const auto where = [&](const std::string& key) {
            return source + ":" + std::to_string(lineno) + (key.empty() ? "" : " (key '" + key + "')");
        };
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError(where("") + ": expected 'key = value'");
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ParseError(where("") + ": empty key");
        if (value.empty()) throw ParseError(where(key) + ": empty value");
        if (seen.count(key)) throw ParseError(where(key) + ": duplicate key, first set on line " + std::to_string(seen[key]));
        seen[key] = lineno;

        auto num = [&](std::string_view text) {
            if (text == "pi") return std::numbers::pi;
            if (text == "-pi") return -std::numbers::pi;
            double v = 0.0;
            const auto* first = text.data();
            const auto* last = text.data() + text.size();
            if (!text.empty() && text.front() == '+') ++first;
            const auto r = std::from_chars(first, last, v);
            if (r.ec != std::errc() || r.ptr != last) throw ParseError(where(key) + ": not a number: '" + std::string(text) + "'");
            return v;
        };
        auto integer = [&](std::string_view text) {
            const double v = num(text);
            if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ParseError(where(key) + ": not an integer: '" + std::string(text) + "'");
            return static_cast<long>(v);
        };
        auto num_list = [&] {
            std::vector<double> out;
            for (const auto& item : detail::split_list(value)) out.push_back(num(item));
            if (out.empty()) throw ParseError(where(key) + ": empty list");
            return out;
        };
        auto spin = [&](std::string_view text) {
            if (text == "half" || text == "1/2" || text == "Half") return Spin::Half;
            if (text == "one" || text == "1" || text == "One") return Spin::One;
            throw ParseError(where(key) + ": unknown spin species '" + std::string(text) + "' (half|one)");
        };

        if (key == "experiment") {
            const auto e = parse_experiment(value);
            if (!e) throw ParseError(where(key) + ": unknown experiment '" + value + "'");
            c.experiment = e;
        } else if (key == "spin.species") {
            c.species = spin(value);
        } else if (key == "spin.channel") {
            c.channel = value;
        } else if (key == "spin.method") {
            std::vector<PumpingMethod> ms;
            for (const auto& m : detail::split_list(value)) {
                if (m == "both") {
                    ms.push_back(PumpingMethod::closed());
                    ms.push_back(PumpingMethod::iterated(100));
                } else if (m == "closed" || m == "ClosedForm") {
                    ms.push_back(PumpingMethod::closed());
                } else if (m == "diagonal" || m == "DiagonalEnsemble") {
                    ms.push_back(PumpingMethod::diagonal());
                } else if (m == "iterated" || m == "IteratedN") {
                    ms.push_back(PumpingMethod::iterated(100));
                } else {
                    throw ParseError(where(key) + ": unknown method '" + m + "' (closed|diagonal|iterated|both)");
                }
            }
            if (ms.empty()) throw ParseError(where(key) + ": empty method list");
            c.methods = ms;
        } else if (key == "spin.n_cycles") {
            c.spin_cycles = integer(value);
        } else if (key == "grid.theta_min") {
            c.theta_min = num(value);
        } else if (key == "grid.theta_max") {
            c.theta_max = num(value);
        } else if (key == "grid.theta_count") {
            c.theta_count = static_cast<int>(integer(value));
        } else if (key == "grid.phi_min") {
            c.phi_min = num(value);
        } else if (key == "grid.phi_max") {
            c.phi_max = num(value);
        } else if (key == "grid.phi_count") {
            c.phi_count = static_cast<int>(integer(value));
        } else if (key == "grid.theta_list") {
            c.theta_list = num_list();
        } else if (key == "grid.phi_list") {
            c.phi_list = num_list();
        } else if (key == "osc.species") {
            c.osc_species.clear();
            for (const auto& s : detail::split_list(value)) c.osc_species.push_back(spin(s));
            if (c.osc_species.empty()) throw ParseError(where(key) + ": empty list");
        } else if (key == "osc.theta_list") {
            c.osc_thetas = num_list();
        } else if (key == "resonance.B_bar") {
            c.b_bar = num(value);
        } else if (key == "resonance.f0") {
            c.f0 = num(value);
        } else if (key == "resonance.f_min") {
            c.f_min = num(value);
        } else if (key == "resonance.f_max") {
            c.f_max = num(value);
        } else if (key == "resonance.f_count") {
            c.f_count = static_cast<int>(integer(value));
        } else if (key == "band.c_H") {
            c.band.c_h = num(value);
        } else if (key == "band.eps0") {
            c.band.eps0 = num(value);
        } else if (key == "band.A_ph") {
            c.band.a_ph = num(value);
        } else if (key == "band.tau_ph") {
            c.band.tau_ph = num(value);
        } else if (key == "band.k_count") {
            c.k_count = static_cast<int>(integer(value));
        } else if (key == "band.n_cycles") {
            if (value == "inf" || value == "infinity" || value == "Infinity") {
                c.band_cycles = kInfiniteCycles;
            } else {
                c.band_cycles = integer(value);
            }
        } else if (key == "trotter.steps") {
            c.trotter.steps_per_cycle = integer(value);
        } else if (key == "trotter.scheme") {
            if (value != "midpoint" && value != "Midpoint") throw ParseError(where(key) + ": only 'midpoint' is supported");
        } else if (key == "bias.eps0_min") {
            c.eps0_min = num(value);
        } else if (key == "bias.eps0_max") {
            c.eps0_max = num(value);
        } else if (key == "bias.eps0_count") {
            c.eps0_count = static_cast<int>(integer(value));
        } else if (key == "output.path") {
            c.output_path = value;
        } else if (key == "output.format") {
            if (value == "csv") {
                c.format = OutputFormat::Csv;
            } else if (value == "jsonl") {
                c.format = OutputFormat::Jsonl;
            } else {
                throw ParseError(where(key) + ": unknown format '" + value + "' (csv|jsonl)");
            }
        } else if (key == "run.workers") {
            c.workers = static_cast<int>(integer(value));
        } else if (key == "run.seed") {
            c.seed = integer(value);
        } else {
            throw ParseError(where(key) + ": unknown key '" + key + "'");
        }
    }
    return c;
}

/// Re-checks every invariant the experiments rely on. Throws ValidationError
/// naming the violated condition.
inline void validate(const RunConfig& c) {
    auto fail = [](const std::string& msg) { throw ValidationError(msg); };
    auto wrap = [&](auto&& fn) {
        try {
            fn();
        } catch (const InvalidArgument& e) {
            fail(e.what());
        }
    };

    if (c.theta_count < 1 || c.phi_count < 1) fail("grid counts must be >= 1");
    for (double t : c.theta_grid())
        if (!(t >= 0.0 && t <= std::numbers::pi)) fail("grid theta values must lie in [0, pi]");
    for (double p : c.phi_grid())
        if (!std::isfinite(p)) fail("grid phi values must be finite");
    if (!(c.phi_max > c.phi_min) && c.phi_list.empty()) fail("grid.phi_max must exceed grid.phi_min");
    wrap([&] { (void)c.resolved_channel(); });
    if (c.spin_cycles < 1) fail("spin.n_cycles must be >= 1");

    for (double t : c.osc_thetas)
        if (!(t >= 0.0 && t <= std::numbers::pi)) fail("osc.theta_list values must lie in [0, pi]");
    if (c.f_count < 1) fail("resonance.f_count must be >= 1");
    if (!(c.f_min > 0.0 && c.f_max >= c.f_min)) fail("resonance frequencies must satisfy 0 < f_min <= f_max");
    wrap([&] { c.proposal().validate(); });

    wrap([&] { c.band.validate(); });
    if (c.band.a_ph < 0.0) fail("band.A_ph must be >= 0 (the sign of the drive is carried by its phase)");
    wrap([&] { c.trotter.validate(); });
    if (c.k_count < 1) fail("band.k_count must be >= 1");
    if (c.band_cycles && *c.band_cycles < 1) fail("band.n_cycles must be >= 1 or inf");
    if (c.eps0_count < 1) fail("bias.eps0_count must be >= 1");
    if (!(c.eps0_max >= c.eps0_min)) fail("bias.eps0_max must be >= bias.eps0_min");

    if (c.workers < 1) fail("run.workers must be >= 1");
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open config file");
    RunConfig c = parse_config(in, path);
    validate(c);
    return c;
}

inline std::string method_list_name(const std::vector<PumpingMethod>& ms) {
    std::string s;
    for (const auto& m : ms) {
        if (!s.empty()) s += ",";
        s += m.name();
    }
    return s;
}

/// Every setting that affects the given experiment, as resolved key/value text.
inline std::vector<std::pair<std::string, std::string>> echo(const RunConfig& c, Experiment e) {
    std::vector<std::pair<std::string, std::string>> out;
    auto add = [&](std::string k, std::string v) { out.emplace_back(std::move(k), std::move(v)); };
    auto add_num = [&](std::string k, double v) { add(std::move(k), format_double(v)); };
    auto add_int = [&](std::string k, long v) { add(std::move(k), std::to_string(v)); };
    auto add_list = [&](std::string k, const std::vector<double>& v) {
        std::string s;
        for (double x : v) s += (s.empty() ? "" : ",") + format_double(x);
        add(std::move(k), s);
    };

    add("experiment", std::string(experiment_name(e)));
    switch (e) {
    case Experiment::SpinMap:
        add("spin.species", std::string(spin_name(c.species)));
        add("spin.channel", std::string(level_label(c.species, c.resolved_channel())));
        add("spin.method", method_list_name(c.resolved_methods()));
        if (c.theta_list.empty()) {
            add_num("grid.theta_min", c.theta_min);
            add_num("grid.theta_max", c.theta_max);
            add_int("grid.theta_count", c.theta_count);
        } else {
            add_list("grid.theta_list", c.theta_list);
        }
        if (c.phi_list.empty()) {
            add_num("grid.phi_min", c.phi_min);
            add_num("grid.phi_max", c.phi_max);
            add_int("grid.phi_count", c.phi_count);
        } else {
            add_list("grid.phi_list", c.phi_list);
        }
        add_num("resonance.window", kResonanceWindow);
        add_int("resonance.max_denominator", kResonanceMaxDenominator);
        break;
    case Experiment::SpinOsc: {
        std::string sp;
        for (Spin s : c.osc_species) sp += (sp.empty() ? "" : ",") + std::string(spin_name(s));
        add("osc.species", sp);
        add_list("osc.theta_list", c.osc_thetas);
        add_num("resonance.B_bar", c.b_bar);
        add_num("resonance.f0", c.f0);
        add_num("resonance.f_min", c.f_min);
        add_num("resonance.f_max", c.f_max);
        add_int("resonance.f_count", c.f_count);
        const auto v = validity_check(c.proposal());
        add_num("resonance.validity_ratio", v.ratio);
        add("resonance.validity_ok", v.ok ? "true" : "false");
        break;
    }
    case Experiment::BandSweep:
    case Experiment::BiasSweep:
        add_num("band.c_H", c.band.c_h);
        if (e == Experiment::BandSweep) {
            add_num("band.eps0", c.band.eps0);
        } else {
            add_num("bias.eps0_min", c.eps0_min);
            add_num("bias.eps0_max", c.eps0_max);
            add_int("bias.eps0_count", c.eps0_count);
        }
        add_num("band.A_ph", c.band.a_ph);
        add_num("band.tau_ph", c.band.tau_ph);
        add_int("band.k_count", c.k_count);
        add("band.n_cycles", c.band_cycles ? std::to_string(*c.band_cycles) : "inf");
        add_int("trotter.steps", c.trotter.steps_per_cycle);
        add("trotter.scheme", "midpoint");
        add_num("constants.hbar_ev", PhysicalConstants::hbar_ev);
        break;
    }
    add("run.seed", std::to_string(c.seed));
    return out;
}

} // namespace zmap::app
