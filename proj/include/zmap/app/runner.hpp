#pragma once
//
// Runs one experiment from a RunConfig and serializes the result as CSV or
// JSON lines. Output is a pure function of the config: the worker count only
// changes who computes a row, never where it lands.
//

#include <ctime>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zmap/app/config.hpp"
#include "zmap/band.hpp"
#include "zmap/ergodic.hpp"
#include "zmap/parallel.hpp"
#include "zmap/resonance.hpp"
#include "zmap/version.hpp"

namespace zmap::app {

/// A module error annotated with the experiment and cell that raised it.
class RunFailure : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

using Cell = std::variant<double, long, std::string>;

struct SweepArtifact {
    Experiment experiment = Experiment::SpinMap;
    std::vector<std::pair<std::string, std::string>> meta;
    std::string timestamp;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace detail {

template <class Fn>
auto with_context(Experiment e, std::size_t cell, Fn&& fn) {
    try {
        return fn();
    } catch (const NumericalError& err) {
        throw RunFailure(std::string(experiment_name(e)) + ", cell " + std::to_string(cell) + ": " + err.what());
    }
}

inline void run_spin_map(const RunConfig& c, int workers, SweepArtifact& a) {
    a.columns = {"theta", "phi", "method", "channel", "p_G", "resonant_flag"};
    const auto thetas = c.theta_grid();
    const auto phis = c.phi_grid();
    const int channel = c.resolved_channel();
    const std::string label(level_label(c.species, channel));
    const std::size_t ncell = thetas.size() * phis.size();
    for (const auto& m : c.resolved_methods()) {
        const auto values = parallel_map(ncell, workers, [&](std::size_t i) {
            return with_context(a.experiment, i, [&] {
                const GeometricAngles g(thetas[i / phis.size()], phis[i % phis.size()]);
                return pumping_value(c.species, channel, g, m);
            });
        });
        for (std::size_t i = 0; i < ncell; ++i) {
            const GeometricAngles g(thetas[i / phis.size()], phis[i % phis.size()]);
            a.rows.push_back({thetas[i / phis.size()], phis[i % phis.size()], m.name(), label, values[i],
                              static_cast<long>(is_resonant(c.species, g) ? 1 : 0)});
        }
    }
}

inline void run_spin_osc(const RunConfig& c, SweepArtifact& a) {
    a.columns = {"species", "theta", "f_hz", "phi_raw", "p_G"};
    const auto proposal = c.proposal();
    for (Spin s : c.osc_species)
        for (double theta : c.osc_thetas)
            for (const auto& pt : oscillation_curve(s, theta, proposal, lowest_level(s)))
                a.rows.push_back({std::string(spin_name(s)), theta, pt.f, pt.phi_raw, pt.p_g});
}

inline void run_band_sweep(const RunConfig& c, int workers, SweepArtifact& a) {
    a.columns = {"k", "theta", "phi", "residual", "p_G", "gap_min_ev", "status"};
    const auto grid = KGrid::uniform(static_cast<std::size_t>(c.k_count));
    const DriveTable drive(c.trotter.steps_per_cycle);
    const auto rows = parallel_map(grid.size(), workers, [&](std::size_t i) {
        return with_context(a.experiment, i, [&] {
            BandCycleSpec s = c.band;
            s.k = grid.points[i];
            return sweep_row(s, drive, c.band_cycles);
        });
    });
    for (const auto& r : rows)
        a.rows.push_back({r.k, r.theta, r.phi, r.residual, r.p_g, r.gap_min, std::string(status_name(r.status))});
}

inline void run_bias_sweep(const RunConfig& c, int workers, SweepArtifact& a) {
    a.columns = {"eps0", "P_total", "skipped_k_count"};
    const auto grid = KGrid::uniform(static_cast<std::size_t>(c.k_count));
    const auto eps = c.eps0_grid();
    std::vector<BiasRow> rows;
    try {
        rows = bias_sweep(c.band, c.trotter, eps, grid, c.band_cycles, workers);
    } catch (const NumericalError& err) {
        throw RunFailure(std::string(experiment_name(a.experiment)) + ": " + err.what());
    }
    for (const auto& r : rows) a.rows.push_back({r.eps0, r.p_total, static_cast<long>(r.skipped)});
}

} // namespace detail

/// Runs experiment `e`. Throws RunFailure on numerical errors.
inline SweepArtifact run(const RunConfig& c, Experiment e, int workers = 1) {
    validate(c);
    SweepArtifact a;
    a.experiment = e;
    a.timestamp = utc_timestamp();
    a.meta = echo(c, e);
    switch (e) {
    case Experiment::SpinMap: detail::run_spin_map(c, workers, a); break;
    case Experiment::SpinOsc: detail::run_spin_osc(c, a); break;
    case Experiment::BandSweep: detail::run_band_sweep(c, workers, a); break;
    case Experiment::BiasSweep: detail::run_bias_sweep(c, workers, a); break;
    }
    return a;
}

inline std::string cell_text(const Cell& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_double(x);
            } else if constexpr (std::is_same_v<T, long>) {
                return std::to_string(x);
            } else {
                return x;
            }
        },
        v);
}

/// Comment header (`# ...`), then the column row, then one line per row.
/// The timestamp is the only line that changes between identical runs.
inline void write_csv(const SweepArtifact& a, std::ostream& out, bool with_timestamp = true) {
    out << "# zmap-lab " << kVersion << "\n";
    if (with_timestamp) out << "# timestamp = " << a.timestamp << "\n";
    for (const auto& [k, v] : a.meta) out << "# " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < a.columns.size(); ++i) out << (i ? "," : "") << a.columns[i];
    out << "\n";
    for (const auto& row : a.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << "\n";
    }
}

/// First line {"meta": {...}}, then one object per row keyed by column.
inline void write_jsonl(const SweepArtifact& a, std::ostream& out, bool with_timestamp = true) {
    nlohmann::ordered_json meta;
    meta["tool"] = "zmap-lab";
    meta["version"] = kVersion;
    if (with_timestamp) meta["timestamp"] = a.timestamp;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : a.meta) cfg[k] = v;
    meta["config"] = cfg;
    meta["columns"] = a.columns;
    out << nlohmann::ordered_json{{"meta", meta}}.dump() << "\n";
    for (const auto& row : a.rows) {
        nlohmann::ordered_json j;
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& x) { j[a.columns[i]] = x; }, row[i]);
        out << j.dump() << "\n";
    }
}

} // namespace zmap::app
