#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"
#include "potential.hpp"
#include "spectra.hpp"

namespace susycrystal {

/// Full round-trip formatting: 17 significant digits, trailing zeros trimmed.
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::square_well: return "well";
        case ProfileKind::susy_crystal: return "susy";
        case ProfileKind::sinusoidal: return "sin";
        case ProfileKind::shifted_sinusoidal: return "sin-shifted";
        case ProfileKind::custom_sampled: return "sampled";
    }
    return "unknown";
}

inline const char* to_string(SweepMethod method) {
    return method == SweepMethod::analytic ? "analytic" : "numeric";
}

namespace detail {

inline std::string provenance_line(const SpectrumProvenance& prov) {
    std::string line = "# provenance: profile=";
    line += to_string(prov.profile);
    line += " method=";
    line += to_string(prov.method);
    if (prov.params) {
        line += " epsilon=" + format_full(prov.params->epsilon);
        line += " k0=" + format_full(prov.params->k0);
        line += " N=" + std::to_string(prov.params->cells);
    }
    if (prov.method == SweepMethod::numeric) {
        line += " slices_per_period=" + std::to_string(prov.slicing.slices_per_period);
        line += " convergence_tol=" + format_full(prov.slicing.convergence_tol);
        line += " max_doublings=" + std::to_string(prov.slicing.max_doublings);
        line += prov.slicing.use_monodromy_power ? " monodromy_power=1" : " monodromy_power=0";
    }
    return line;
}

}  // namespace detail

/// Samples the profile on a uniform grid of `samples_per_cell` points per
/// period (endpoint included) and writes `x,V_re,V_im` rows at full double
/// precision.
inline void write_potential_csv(std::ostream& os, const PotentialProfile& profile,
                                int samples_per_cell) {
    if (samples_per_cell < 2) throw std::invalid_argument("need at least 2 samples per cell");
    const int cells = std::max(1, profile.full_periods());
    const long total = static_cast<long>(cells) * samples_per_cell;
    const double step = profile.support_length() / static_cast<double>(total);
    os << "x,V_re,V_im\n";
    for (long i = 0; i <= total; ++i) {
        const double x = std::min(i * step, profile.support_length());
        const complexd v = profile(x);
        os << format_full(x) << ',' << format_full(v.real()) << ',' << format_full(v.imag()) << '\n';
    }
}

inline void write_spectrum_csv(std::ostream& os, const SpectrumGrid& grid) {
    os << detail::provenance_line(grid.provenance) << '\n';
    os << "p,t_re,t_im,rl_re,rl_im,rr_re,rr_im,T,Rl,Rr\n";
    for (std::size_t i = 0; i < grid.p_values.size(); ++i) {
        const ScatteringCoefficients& c = grid.rows[i];
        os << format_full(grid.p_values[i]) << ',' << format_full(c.transmission.real()) << ','
           << format_full(c.transmission.imag()) << ',' << format_full(c.reflection_left.real())
           << ',' << format_full(c.reflection_left.imag()) << ','
           << format_full(c.reflection_right.real()) << ',' << format_full(c.reflection_right.imag())
           << ',' << format_full(c.transmittance()) << ',' << format_full(c.reflectance_left())
           << ',' << format_full(c.reflectance_right()) << '\n';
    }
}

/// JSON mirror of the CSV layout: a provenance object plus one row object per
/// grid point with the same field names as the CSV columns.
inline void write_spectrum_json(std::ostream& os, const SpectrumGrid& grid) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json prov;
    prov["profile"] = to_string(grid.provenance.profile);
    prov["method"] = to_string(grid.provenance.method);
    if (grid.provenance.params) {
        prov["epsilon"] = grid.provenance.params->epsilon;
        prov["k0"] = grid.provenance.params->k0;
        prov["N"] = grid.provenance.params->cells;
    }
    if (grid.provenance.method == SweepMethod::numeric) {
        prov["slices_per_period"] = grid.provenance.slicing.slices_per_period;
        prov["convergence_tol"] = grid.provenance.slicing.convergence_tol;
        prov["max_doublings"] = grid.provenance.slicing.max_doublings;
        prov["monodromy_power"] = grid.provenance.slicing.use_monodromy_power;
    }
    doc["provenance"] = std::move(prov);

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < grid.p_values.size(); ++i) {
        const ScatteringCoefficients& c = grid.rows[i];
        nlohmann::ordered_json row;
        row["p"] = grid.p_values[i];
        row["t_re"] = c.transmission.real();
        row["t_im"] = c.transmission.imag();
        row["rl_re"] = c.reflection_left.real();
        row["rl_im"] = c.reflection_left.imag();
        row["rr_re"] = c.reflection_right.real();
        row["rr_im"] = c.reflection_right.imag();
        row["T"] = c.transmittance();
        row["Rl"] = c.reflectance_left();
        row["Rr"] = c.reflectance_right();
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
}

inline void write_table_csv(std::ostream& os, const DataTable& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        os << table.columns[i] << (i + 1 < table.columns.size() ? ',' : '\n');
    }
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << format_full(row[i]) << (i + 1 < row.size() ? ',' : '\n');
        }
    }
}

}  // namespace susycrystal
