// Command-line front end: synthesize the crystal potential, compute
// transmission/reflection spectra analytically or numerically, cross-validate
// the two engines, and emit the canonical figure datasets. All outputs are
// deterministic; identical configurations produce byte-identical files.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "susycrystal/susycrystal.hpp"

namespace fs = std::filesystem;
using namespace susycrystal;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_mismatch = 1;  // cross-validation failed
constexpr int exit_config = 2;    // bad flags, config file, or preconditions
constexpr int exit_io = 3;
constexpr int exit_numeric = 4;   // non-convergence or numeric guard tripped

struct RunConfig {
    double epsilon = 0.01;
    double k0 = 1.0;
    int cells = 100;
    std::string profile = "susy";
    std::string method = "analytic";
    double pmin = -1.0;  // negative: default 0.6*k0
    double pmax = -1.0;  // negative: default 1.4*k0
    int points = 2001;
    int slices = 64;
    double tol = 1e-6;
    int max_doublings = 8;
    int threads = 0;  // 0: SUSY_CRYSTAL_THREADS env var, then hardware count
    std::string out;
    std::string format = "csv";
    int samples_per_cell = 512;
    double compare_tol = -1.0;  // negative: same as tol
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "epsilon") cfg.epsilon = std::stod(value);
        else if (key == "k0") cfg.k0 = std::stod(value);
        else if (key == "N") cfg.cells = std::stoi(value);
        else if (key == "profile") cfg.profile = value;
        else if (key == "method") cfg.method = value;
        else if (key == "pmin") cfg.pmin = std::stod(value);
        else if (key == "pmax") cfg.pmax = std::stod(value);
        else if (key == "points") cfg.points = std::stoi(value);
        else if (key == "slices") cfg.slices = std::stoi(value);
        else if (key == "tol") cfg.tol = std::stod(value);
        else if (key == "max-doublings") cfg.max_doublings = std::stoi(value);
        else if (key == "threads") cfg.threads = std::stoi(value);
        else if (key == "out") cfg.out = value;
        else if (key == "format") cfg.format = value;
        else if (key == "samples-per-cell") cfg.samples_per_cell = std::stoi(value);
        else if (key == "compare-tol") cfg.compare_tol = std::stod(value);
        else throw std::invalid_argument("unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for config key '" + key + "': " + value);
    }
}

/// Flat key=value lines or a JSON object; keys mirror the long flags.
void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot read config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("config file " + path + ": " + e.what());
        }
        for (const auto& [key, value] : doc.items()) {
            apply_config_entry(cfg, key,
                               value.is_string() ? value.get<std::string>() : value.dump());
        }
        return;
    }
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config file " + path + ": expected key=value, got '" +
                                        stripped + "'");
        }
        apply_config_entry(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
}

/// The config file must be applied before the parser sees the flags so that
/// flags override it; pull --config out of argv by hand.
std::optional<std::string> find_config_argument(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return std::nullopt;
}

PotentialProfile make_profile(const RunConfig& cfg, const CrystalParams& cp) {
    if (cfg.profile == "well") return PotentialProfile::square_well(cp);
    if (cfg.profile == "susy") return PotentialProfile::susy_crystal(cp);
    if (cfg.profile == "sin") return PotentialProfile::sinusoidal(cp);
    if (cfg.profile == "sin-shifted") return PotentialProfile::shifted_sinusoidal(cp);
    throw std::invalid_argument("profile must be one of well|susy|sin|sin-shifted");
}

SweepMethod parse_method(const RunConfig& cfg) {
    if (cfg.method == "analytic") return SweepMethod::analytic;
    if (cfg.method == "numeric") return SweepMethod::numeric;
    throw std::invalid_argument("method must be analytic or numeric");
}

SlicingSpec make_slicing(const RunConfig& cfg) {
    SlicingSpec spec;
    spec.slices_per_period = cfg.slices;
    spec.convergence_tol = cfg.tol;
    spec.max_doublings = cfg.max_doublings;
    return spec;
}

int resolve_threads(const RunConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("SUSY_CRYSTAL_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open output file " + path);
    return os;
}

void band_defaults(const RunConfig& cfg, double& pmin, double& pmax) {
    pmin = cfg.pmin > 0.0 ? cfg.pmin : 0.6 * cfg.k0;
    pmax = cfg.pmax > 0.0 ? cfg.pmax : 1.4 * cfg.k0;
}

int run_synth(const RunConfig& cfg) {
    const CrystalParams cp = derive_params(cfg.epsilon, cfg.k0, cfg.cells);
    std::cout << "epsilon = " << format_full(cp.epsilon) << "\n"
              << "k0 = " << format_full(cp.k0) << "\n"
              << "N = " << cp.cells << "\n"
              << "Lambda = " << format_full(cp.period) << "\n"
              << "L = " << format_full(cp.length) << "\n"
              << "E1 = " << format_full(cp.factorization_energy) << "\n"
              << "k1 = " << format_full(cp.k1) << "\n"
              << "rho = " << format_full(cp.rho) << "\n"
              << "mu = " << format_full(cp.mu) << "\n";

    const std::string path = cfg.out.empty() ? "potential.csv" : cfg.out;
    std::ofstream os = open_output(path);
    write_potential_csv(os, make_profile(cfg, cp), cfg.samples_per_cell);
    os.flush();
    if (!os) throw std::ios_base::failure("write to " + path + " failed");
    std::cout << "wrote " << path << "\n";
    return exit_ok;
}

int run_spectrum(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json") {
        throw std::invalid_argument("format must be csv or json");
    }
    const CrystalParams cp = derive_params(cfg.epsilon, cfg.k0, cfg.cells);
    double pmin = 0.0, pmax = 0.0;
    band_defaults(cfg, pmin, pmax);
    const SpectrumGrid grid =
        sweep(make_profile(cfg, cp), linear_grid(pmin, pmax, cfg.points), parse_method(cfg),
              make_slicing(cfg), resolve_threads(cfg));

    const std::string path = cfg.out.empty() ? ("spectrum." + cfg.format) : cfg.out;
    std::ofstream os = open_output(path);
    if (cfg.format == "csv") {
        write_spectrum_csv(os, grid);
    } else {
        write_spectrum_json(os, grid);
    }
    os.flush();
    if (!os) throw std::ios_base::failure("write to " + path + " failed");
    std::cout << "wrote " << path << " (" << grid.p_values.size() << " points)\n";
    return exit_ok;
}

int run_compare(const RunConfig& cfg) {
    if (cfg.profile != "well" && cfg.profile != "susy") {
        throw std::invalid_argument("compare needs a profile with an analytic solution (well|susy)");
    }
    const CrystalParams cp = derive_params(cfg.epsilon, cfg.k0, cfg.cells);
    double pmin = 0.0, pmax = 0.0;
    band_defaults(cfg, pmin, pmax);
    const PotentialProfile profile = make_profile(cfg, cp);
    const std::vector<double> momenta = linear_grid(pmin, pmax, cfg.points);
    const int threads = resolve_threads(cfg);
    const SpectrumGrid analytic = sweep(profile, momenta, SweepMethod::analytic, {}, threads);
    const SpectrumGrid numeric =
        sweep(profile, momenta, SweepMethod::numeric, make_slicing(cfg), threads);

    struct Worst {
        double value = 0.0;
        double at = 0.0;
    };
    Worst worst_t, worst_rl, worst_rr;
    const auto update = [](Worst& w, double ana, double num, double p) {
        const double discrepancy = std::abs(num - ana) / std::max(1.0, std::abs(ana));
        if (discrepancy > w.value) w = {discrepancy, p};
    };
    for (std::size_t i = 0; i < momenta.size(); ++i) {
        update(worst_t, analytic.rows[i].transmittance(), numeric.rows[i].transmittance(), momenta[i]);
        update(worst_rl, analytic.rows[i].reflectance_left(), numeric.rows[i].reflectance_left(),
               momenta[i]);
        update(worst_rr, analytic.rows[i].reflectance_right(), numeric.rows[i].reflectance_right(),
               momenta[i]);
    }

    const double tolerance = cfg.compare_tol > 0.0 ? cfg.compare_tol : cfg.tol;
    const bool pass =
        worst_t.value <= tolerance && worst_rl.value <= tolerance && worst_rr.value <= tolerance;

    std::ostringstream report;
    report << "analytic vs numeric over [" << format_full(pmin) << ", " << format_full(pmax)
           << "], " << cfg.points << " points (discrepancy = |num-ana|/max(1,|ana|))\n"
           << "T:  max discrepancy " << format_full(worst_t.value) << " at p=" << format_full(worst_t.at)
           << "\n"
           << "Rl: max discrepancy " << format_full(worst_rl.value)
           << " at p=" << format_full(worst_rl.at) << "\n"
           << "Rr: max discrepancy " << format_full(worst_rr.value)
           << " at p=" << format_full(worst_rr.at) << "\n"
           << "RESULT: " << (pass ? "PASS" : "FAIL") << " (tolerance " << format_full(tolerance)
           << ")\n";
    std::cout << report.str();
    if (!cfg.out.empty()) {
        std::ofstream os = open_output(cfg.out);
        os << report.str();
        os.flush();
        if (!os) throw std::ios_base::failure("write to " + cfg.out + " failed");
    }
    return pass ? exit_ok : exit_mismatch;
}

int run_figure(int figure_id, const FigureOptions& opt, const RunConfig& cfg) {
    const std::vector<DataTable> tables = figure_data(figure_id, opt);
    const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::ios_base::failure("cannot create output directory " + dir.string());
    for (const DataTable& table : tables) {
        const fs::path path = dir / ("fig" + std::to_string(figure_id) + "_" + table.label + ".csv");
        std::ofstream os = open_output(path.string());
        write_table_csv(os, table);
        os.flush();
        if (!os) throw std::ios_base::failure("write to " + path.string() + " failed");
        std::cout << "wrote " << path.string() << "\n";
    }
    return exit_ok;
}

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--epsilon", cfg.epsilon, "well depth (0 <= epsilon < k0^2)");
    cmd->add_option("--k0", cfg.k0, "Bragg wavenumber");
    cmd->add_option("--N", cfg.cells, "number of unit cells");
    cmd->add_option("--threads", cfg.threads,
                    "worker threads (0 = SUSY_CRYSTAL_THREADS env var, then hardware)");
    cmd->add_option("--out", cfg.out, "output path");
    cmd->add_option("--config", config_path,
                    "config file (key=value lines or a JSON object); flags override it");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    try {
        if (const auto config_path = find_config_argument(argc, argv)) {
            apply_config_file(*config_path, cfg);
        }
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }

    CLI::App app{"SUSY-synthesized PT-symmetric complex crystal: potential synthesis,"
                 " scattering spectra, and analytic/numeric cross-validation"};
    app.require_subcommand(1);
    std::string config_path;  // already applied; registered so the parser accepts the flag

    CLI::App* synth = app.add_subcommand("synth", "synthesize and sample the crystal potential");
    add_common_options(synth, cfg, config_path);
    synth->add_option("--profile", cfg.profile, "well|susy|sin|sin-shifted");
    synth->add_option("--samples-per-cell", cfg.samples_per_cell, "samples per unit cell");

    CLI::App* spectrum = app.add_subcommand("spectrum", "transmission/reflection spectrum over a band");
    add_common_options(spectrum, cfg, config_path);
    spectrum->add_option("--profile", cfg.profile, "well|susy|sin|sin-shifted");
    spectrum->add_option("--method", cfg.method, "analytic|numeric");
    spectrum->add_option("--pmin", cfg.pmin, "band start (default 0.6*k0)");
    spectrum->add_option("--pmax", cfg.pmax, "band end (default 1.4*k0)");
    spectrum->add_option("--points", cfg.points, "grid points");
    spectrum->add_option("--slices", cfg.slices, "initial slices per period");
    spectrum->add_option("--tol", cfg.tol, "convergence tolerance of the numeric engine");
    spectrum->add_option("--max-doublings", cfg.max_doublings, "slice-doubling budget (0 = fixed)");
    spectrum->add_option("--format", cfg.format, "csv|json");

    CLI::App* compare = app.add_subcommand("compare", "cross-validate analytic vs numeric spectra");
    add_common_options(compare, cfg, config_path);
    compare->add_option("--profile", cfg.profile, "well|susy");
    compare->add_option("--pmin", cfg.pmin, "band start (default 0.6*k0)");
    compare->add_option("--pmax", cfg.pmax, "band end (default 1.4*k0)");
    compare->add_option("--points", cfg.points, "grid points");
    compare->add_option("--slices", cfg.slices, "initial slices per period");
    compare->add_option("--tol", cfg.tol, "convergence tolerance of the numeric engine");
    compare->add_option("--max-doublings", cfg.max_doublings, "slice-doubling budget (0 = fixed)");
    compare->add_option("--compare-tol", cfg.compare_tol, "pass/fail threshold (default: --tol)");

    CLI::App* figure = app.add_subcommand("figure", "emit the canonical datasets (ids 1..4)");
    int figure_id = 0;
    FigureOptions fig_opt;
    figure->add_option("id", figure_id, "figure id (1..4)")->required();
    figure->add_option("--epsilon", fig_opt.epsilon, "override the default well depth(s)");
    figure->add_option("--k0", fig_opt.k0, "override the Bragg wavenumber");
    figure->add_option("--N", fig_opt.cells, "override the default cell count(s)");
    figure->add_option("--slices", cfg.slices, "initial slices per period");
    figure->add_option("--tol", cfg.tol, "convergence tolerance of the numeric engine");
    figure->add_option("--threads", cfg.threads, "worker threads");
    figure->add_option("--out", cfg.out, "output directory (default .)");
    figure->add_option("--config", config_path, "config file (slicing/threads keys apply)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (synth->parsed()) return run_synth(cfg);
        if (spectrum->parsed()) return run_spectrum(cfg);
        if (compare->parsed()) return run_compare(cfg);
        fig_opt.slicing = make_slicing(cfg);
        fig_opt.threads = resolve_threads(cfg);
        return run_figure(figure_id, fig_opt, cfg);
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_mismatch;
    }
}
