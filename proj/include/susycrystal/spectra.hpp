#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "analytic.hpp"
#include "numeric.hpp"
#include "potential.hpp"

namespace susycrystal {

enum class SweepMethod { analytic, numeric };

struct SpectrumProvenance {
    ProfileKind profile = ProfileKind::susy_crystal;
    SweepMethod method = SweepMethod::analytic;
    std::optional<CrystalParams> params;
    SlicingSpec slicing;     ///< meaningful for numeric sweeps
    std::string created_at;  ///< wall-clock tag; never serialized
};

struct SpectrumGrid {
    std::vector<double> p_values;  ///< strictly increasing, all > 0
    std::vector<ScatteringCoefficients> rows;
    SpectrumProvenance provenance;
};

/// Uniformly spaced momentum grid with both endpoints included.
inline std::vector<double> linear_grid(double pmin, double pmax, int points) {
    if (!(pmin > 0.0) || !(pmax > pmin)) throw std::invalid_argument("need 0 < pmin < pmax");
    if (points < 2) throw std::invalid_argument("need at least 2 grid points");
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double step = (pmax - pmin) / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = pmin + i * step;
    grid.back() = pmax;
    return grid;
}

/// Band grid plus a local refinement window around k1, merged and deduplicated.
/// The left-reflectance peak narrows like 1/L, so the plain band grid
/// undersamples it at large cell counts.
inline std::vector<double> refined_band_grid(const CrystalParams& cp, double pmin, double pmax,
                                             int points, double half_window = 5e-3,
                                             int window_points = 201) {
    std::vector<double> grid = linear_grid(pmin, pmax, points);
    const double lo = cp.k1 - half_window;
    const double hi = cp.k1 + half_window;
    if (lo > 0.0 && lo >= pmin && hi <= pmax) {
        const std::vector<double> window = linear_grid(lo, hi, window_points);
        grid.insert(grid.end(), window.begin(), window.end());
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    return grid;
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& worker : pool) worker.join();
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

inline std::string timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

[[noreturn]] inline void rethrow_with_momentum(double p) {
    try {
        throw;
    } catch (const ConvergenceError& e) {
        throw ConvergenceError("at p=" + std::to_string(p) + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("at p=" + std::to_string(p) + ": " + e.what());
    } catch (const std::domain_error& e) {
        throw std::domain_error("at p=" + std::to_string(p) + ": " + e.what());
    }
}

}  // namespace detail

/// Scattering coefficients over a momentum grid. Analytic sweeps exist for the
/// square well and the partner crystal; the numeric engine accepts every
/// profile kind. Per-point failures are reported with the offending momentum.
/// Points are independent, so the sweep partitions the grid across threads;
/// assembly order is fixed by the grid, making results thread-count invariant.
inline SpectrumGrid sweep(const PotentialProfile& profile, std::vector<double> p_values,
                          SweepMethod method, const SlicingSpec& slicing = {}, int threads = 1) {
    if (p_values.empty()) throw std::invalid_argument("empty momentum grid");
    if (!(p_values.front() > 0.0)) throw std::invalid_argument("momenta must be positive");
    for (std::size_t i = 1; i < p_values.size(); ++i) {
        if (!(p_values[i] > p_values[i - 1])) {
            throw std::invalid_argument("momentum grid must be strictly increasing");
        }
    }
    const bool analytic_capable =
        profile.kind() == ProfileKind::square_well || profile.kind() == ProfileKind::susy_crystal;
    if (method == SweepMethod::analytic && !analytic_capable) {
        throw std::invalid_argument("analytic sweep supports only the square-well and crystal profiles");
    }

    SpectrumGrid grid;
    grid.rows.resize(p_values.size());
    grid.provenance.profile = profile.kind();
    grid.provenance.method = method;
    grid.provenance.params = profile.params();
    grid.provenance.slicing = slicing;
    grid.provenance.created_at = detail::timestamp_now();

    const CrystalParams* cp = profile.params() ? &*profile.params() : nullptr;
    detail::parallel_for(p_values.size(), threads, [&](std::size_t i) {
        const double p = p_values[i];
        try {
            if (method == SweepMethod::analytic) {
                grid.rows[i] = (profile.kind() == ProfileKind::square_well)
                                   ? square_well_coefficients(p, *cp)
                                   : crystal_coefficients(p, *cp);
            } else {
                grid.rows[i] = scatter_numeric(profile, p, slicing).coefficients;
            }
        } catch (...) {
            detail::rethrow_with_momentum(p);
        }
    });
    grid.p_values = std::move(p_values);
    return grid;
}

/// Band extrema quantifying one-way invisibility: how far the transmittance
/// strays from one, the ceiling of the right reflectance, and the height and
/// location of the left-reflectance peak.
struct InvisibilityReport {
    double band_min = 0.0;
    double band_max = 0.0;
    double sup_abs_transmittance_minus_one = 0.0;
    double sup_reflectance_right = 0.0;
    double max_reflectance_left = 0.0;
    double argmax_reflectance_left = 0.0;
};

inline InvisibilityReport invisibility_metrics(const SpectrumGrid& grid, double band_min,
                                               double band_max) {
    if (!(band_min < band_max)) throw std::invalid_argument("band must satisfy band_min < band_max");
    if (grid.p_values.empty()) throw std::invalid_argument("empty spectrum");
    if (band_min < grid.p_values.front() || band_max > grid.p_values.back()) {
        throw std::invalid_argument("band must lie within the grid range");
    }

    InvisibilityReport report;
    report.band_min = band_min;
    report.band_max = band_max;
    bool any = false;
    for (std::size_t i = 0; i < grid.p_values.size(); ++i) {
        const double p = grid.p_values[i];
        if (p < band_min || p > band_max) continue;
        any = true;
        const ScatteringCoefficients& c = grid.rows[i];
        report.sup_abs_transmittance_minus_one =
            std::max(report.sup_abs_transmittance_minus_one, std::abs(c.transmittance() - 1.0));
        report.sup_reflectance_right = std::max(report.sup_reflectance_right, c.reflectance_right());
        if (c.reflectance_left() > report.max_reflectance_left) {
            report.max_reflectance_left = c.reflectance_left();
            report.argmax_reflectance_left = p;
        }
    }
    if (!any) throw std::invalid_argument("band contains no grid points");
    return report;
}

/// A labeled plot-ready table: named columns over rows of doubles.
struct DataTable {
    std::string label;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct FigureOptions {
    std::optional<double> epsilon;  ///< overrides the per-figure default(s)
    std::optional<double> k0;
    std::optional<int> cells;
    SlicingSpec slicing;
    int threads = 1;
};

namespace detail {

inline std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline DataTable potential_cell_table(const CrystalParams& cp, int points) {
    DataTable table;
    table.label = "eps" + short_number(cp.epsilon);
    table.columns = {"x", "V_re", "V_im"};
    table.rows.reserve(static_cast<std::size_t>(points));
    const double step = cp.period / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) {
        const double x = std::min(i * step, cp.period);
        const complexd v = partner_potential(x, cp);
        table.rows.push_back({x, v.real(), v.imag()});
    }
    return table;
}

inline DataTable column_table(const SpectrumGrid& grid, const std::string& label,
                              const std::string& column, double (ScatteringCoefficients::*get)() const) {
    DataTable table;
    table.label = label;
    table.columns = {"p", column};
    table.rows.reserve(grid.p_values.size());
    for (std::size_t i = 0; i < grid.p_values.size(); ++i) {
        table.rows.push_back({grid.p_values[i], (grid.rows[i].*get)()});
    }
    return table;
}

}  // namespace detail

/// Datasets behind the four canonical views of the crystal:
///   1 - real/imaginary potential profile over one cell, shallow and shallower;
///   2 - square-well reflectance across the Bragg band;
///   3 - crystal reflectances and transmittance for growing cell counts;
///   4 - numeric transmittance of the unbiased vs. biased sinusoidal crystal.
/// Returns one table per output curve; throws std::invalid_argument for ids
/// outside 1..4.
inline std::vector<DataTable> figure_data(int figure_id, const FigureOptions& opt = {}) {
    const double k0 = opt.k0.value_or(1.0);
    std::vector<DataTable> tables;

    switch (figure_id) {
        case 1: {
            const std::vector<double> eps_list =
                opt.epsilon ? std::vector<double>{*opt.epsilon} : std::vector<double>{0.1, 0.01};
            for (double eps : eps_list) {
                tables.push_back(
                    detail::potential_cell_table(derive_params(eps, k0, opt.cells.value_or(1)), 1001));
            }
            return tables;
        }
        case 2: {
            const std::vector<double> eps_list =
                opt.epsilon ? std::vector<double>{*opt.epsilon} : std::vector<double>{0.1, 0.01};
            for (double eps : eps_list) {
                const CrystalParams cp = derive_params(eps, k0, opt.cells.value_or(100));
                const std::vector<double> grid = linear_grid(0.6 * k0, 1.4 * k0, 2001);
                DataTable table;
                table.label = "eps" + detail::short_number(eps);
                table.columns = {"p", "R1"};
                table.rows.reserve(grid.size());
                for (double p : grid) table.rows.push_back({p, square_well_reflectance(p, cp)});
                tables.push_back(std::move(table));
            }
            return tables;
        }
        case 3: {
            const std::vector<int> n_list =
                opt.cells ? std::vector<int>{*opt.cells} : std::vector<int>{100, 1000, 5000};
            for (int cells : n_list) {
                const CrystalParams cp = derive_params(opt.epsilon.value_or(0.01), k0, cells);
                const SpectrumGrid grid =
                    sweep(PotentialProfile::susy_crystal(cp),
                          refined_band_grid(cp, 0.6 * k0, 1.4 * k0, 2001), SweepMethod::analytic, {},
                          opt.threads);
                const std::string tag = "N" + std::to_string(cells);
                tables.push_back(detail::column_table(grid, tag + "_Rl", "Rl",
                                                      &ScatteringCoefficients::reflectance_left));
                tables.push_back(detail::column_table(grid, tag + "_Rr", "Rr",
                                                      &ScatteringCoefficients::reflectance_right));
                tables.push_back(
                    detail::column_table(grid, tag + "_T", "T", &ScatteringCoefficients::transmittance));
            }
            return tables;
        }
        case 4: {
            const CrystalParams cp =
                derive_params(opt.epsilon.value_or(0.01), k0, opt.cells.value_or(5000));
            const std::vector<double> grid = refined_band_grid(cp, 0.6 * k0, 1.4 * k0, 2001);
            const SpectrumGrid unbiased = sweep(PotentialProfile::sinusoidal(cp), grid,
                                                SweepMethod::numeric, opt.slicing, opt.threads);
            const SpectrumGrid biased = sweep(PotentialProfile::shifted_sinusoidal(cp), grid,
                                              SweepMethod::numeric, opt.slicing, opt.threads);
            tables.push_back(
                detail::column_table(unbiased, "sin", "T", &ScatteringCoefficients::transmittance));
            tables.push_back(
                detail::column_table(biased, "sin_shifted", "T", &ScatteringCoefficients::transmittance));
            return tables;
        }
        default:
            throw std::invalid_argument("figure id must be 1..4");
    }
}

}  // namespace susycrystal
