#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("susy_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args, const fs::path& cwd, const std::string& env = "") {
    const fs::path out_file = cwd / "_stdout.txt";
    const fs::path err_file = cwd / "_stderr.txt";
    const std::string command = "cd '" + cwd.string() + "' && " + (env.empty() ? "" : env + " ") +
                                "'" + SUSY_CRYSTAL_CLI + "' " + args + " > '" + out_file.string() +
                                "' 2> '" + err_file.string() + "'";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

double printed_value(const std::string& out, const std::string& key) {
    const auto pos = out.find(key + " = ");
    REQUIRE(pos != std::string::npos);
    return std::strtod(out.c_str() + pos + key.size() + 3, nullptr);
}

std::vector<double> parse_csv_row(const std::string& line) {
    std::vector<double> row;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) row.push_back(std::strtod(field.c_str(), nullptr));
    return row;
}

}  // namespace

TEST_CASE("synth writes samples and prints the derived parameters") {
    const fs::path dir = fresh_dir("synth");
    const RunResult r = run_cli("synth --epsilon 0.01 --k0 1 --N 1 --out pot.csv", dir);
    REQUIRE(r.exit_code == 0);
    CHECK(printed_value(r.out, "rho") == Catch::Approx(2.9932228461263809).epsilon(1e-12));
    CHECK(printed_value(r.out, "mu") == Catch::Approx(0.1).epsilon(1e-12));
    CHECK(printed_value(r.out, "k1") == Catch::Approx(0.99498743710661995).epsilon(1e-12));

    const std::vector<std::string> lines = lines_of(slurp(dir / "pot.csv"));
    REQUIRE(lines.size() > 10);
    CHECK(lines[0] == "x,V_re,V_im");
    const std::vector<double> first = parse_csv_row(lines[1]);
    CHECK(first[0] == 0.0);
    CHECK(first[2] == 0.0);
    // PT symmetry of the sampled cell: row i and its mirror are conjugate
    const std::size_t n = lines.size() - 2;  // data rows minus the endpoint row
    const std::vector<double> a = parse_csv_row(lines[1 + n / 4]);
    const std::vector<double> b = parse_csv_row(lines[1 + n - n / 4]);
    CHECK(a[1] == Catch::Approx(b[1]).epsilon(1e-9));
    CHECK(a[2] == Catch::Approx(-b[2]).epsilon(1e-9));
}

TEST_CASE("synth rejects invalid parameters with exit code 2") {
    const fs::path dir = fresh_dir("synth_bad");
    const RunResult r = run_cli("synth --epsilon 1.0 --k0 1 --N 1", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("epsilon must be < k0^2") != std::string::npos);
}

TEST_CASE("unwritable output path gives exit code 3") {
    const fs::path dir = fresh_dir("synth_io");
    const RunResult r = run_cli("synth --epsilon 0.01 --out /nonexistent_dir_zz/pot.csv", dir);
    CHECK(r.exit_code == 3);
}

TEST_CASE("spectrum produces the configured number of rows") {
    const fs::path dir = fresh_dir("spectrum");
    const RunResult r =
        run_cli("spectrum --profile susy --epsilon 0.01 --N 100 --method analytic --out s.csv", dir);
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = lines_of(slurp(dir / "s.csv"));
    REQUIRE(lines.size() == 2 + 2001);
    CHECK(lines[0].rfind("# provenance:", 0) == 0);
    CHECK(lines[1] == "p,t_re,t_im,rl_re,rl_im,rr_re,rr_im,T,Rl,Rr");
    const std::vector<double> first = parse_csv_row(lines[2]);
    CHECK(first[0] == 0.6);
    const std::vector<double> last = parse_csv_row(lines.back());
    CHECK(last[0] == 1.4);
}

TEST_CASE("numeric spectrum agrees with the analytic one") {
    const fs::path dir = fresh_dir("spectrum_num");
    REQUIRE(run_cli("spectrum --profile susy --N 5 --points 21 --method analytic --out a.csv", dir)
                .exit_code == 0);
    REQUIRE(run_cli("spectrum --profile susy --N 5 --points 21 --method numeric --out n.csv", dir)
                .exit_code == 0);
    const std::vector<std::string> ana = lines_of(slurp(dir / "a.csv"));
    const std::vector<std::string> num = lines_of(slurp(dir / "n.csv"));
    REQUIRE(ana.size() == num.size());
    for (std::size_t i = 2; i < ana.size(); ++i) {
        const double t_ana = parse_csv_row(ana[i])[7];
        const double t_num = parse_csv_row(num[i])[7];
        REQUIRE(std::abs(t_num - t_ana) < 1e-6);
    }
}

TEST_CASE("zero well depth produces all-zero reflectance columns") {
    const fs::path dir = fresh_dir("spectrum_free");
    const RunResult r = run_cli("spectrum --epsilon 0 --points 11 --out s.csv", dir);
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = lines_of(slurp(dir / "s.csv"));
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const std::vector<double> row = parse_csv_row(lines[i]);
        REQUIRE(row[8] == 0.0);
        REQUIRE(row[9] == 0.0);
        REQUIRE(row[7] == 1.0);
    }
}

TEST_CASE("identical configurations produce byte-identical outputs") {
    const fs::path dir = fresh_dir("idempotent");
    REQUIRE(run_cli("spectrum --profile susy --N 20 --points 51 --method numeric --threads 1 "
                    "--out one.csv", dir).exit_code == 0);
    REQUIRE(run_cli("spectrum --profile susy --N 20 --points 51 --method numeric --threads 3 "
                    "--out two.csv", dir).exit_code == 0);
    CHECK(slurp(dir / "one.csv") == slurp(dir / "two.csv"));

    REQUIRE(run_cli("spectrum --N 20 --points 31 --format json --out one.json", dir).exit_code == 0);
    REQUIRE(run_cli("spectrum --N 20 --points 31 --format json --out two.json", dir).exit_code == 0);
    CHECK(slurp(dir / "one.json") == slurp(dir / "two.json"));
}

TEST_CASE("compare passes for both solvable profiles and fails when degraded") {
    const fs::path dir = fresh_dir("compare");
    const RunResult susy = run_cli("compare --profile susy --N 20 --points 41", dir);
    CHECK(susy.exit_code == 0);
    CHECK(susy.out.find("RESULT: PASS") != std::string::npos);

    const RunResult well =
        run_cli("compare --profile well --N 20 --points 41 --compare-tol 1e-8", dir);
    CHECK(well.exit_code == 0);
    CHECK(well.out.find("RESULT: PASS") != std::string::npos);

    const RunResult coarse = run_cli(
        "compare --profile susy --N 20 --points 41 --slices 4 --max-doublings 0", dir);
    CHECK(coarse.exit_code == 1);
    CHECK(coarse.out.find("RESULT: FAIL") != std::string::npos);
    CHECK(coarse.out.find("max discrepancy") != std::string::npos);

    const RunResult sin_profile = run_cli("compare --profile sin --N 20", dir);
    CHECK(sin_profile.exit_code == 2);
}

TEST_CASE("figure command writes one file per curve") {
    const fs::path dir = fresh_dir("figure");
    const RunResult fig3 = run_cli("figure 3 --N 100 --out figs", dir);
    REQUIRE(fig3.exit_code == 0);
    for (const char* name : {"fig3_N100_Rl.csv", "fig3_N100_Rr.csv", "fig3_N100_T.csv"}) {
        REQUIRE(fs::exists(dir / "figs" / name));
    }
    const RunResult fig1 = run_cli("figure 1 --out figs", dir);
    REQUIRE(fig1.exit_code == 0);
    for (const char* name : {"fig1_eps0.1.csv", "fig1_eps0.01.csv"}) {
        const fs::path path = dir / "figs" / name;
        REQUIRE(fs::exists(path));
        CHECK(lines_of(slurp(path)).size() == 1 + 1001);
    }
    const RunResult bad = run_cli("figure 5", dir);
    CHECK(bad.exit_code == 2);
}

TEST_CASE("config file values apply beneath command-line flags") {
    const fs::path dir = fresh_dir("config");
    {
        std::ofstream json(dir / "run.json");
        json << "{\"epsilon\": 0.1, \"N\": 1}\n";
    }
    const RunResult from_json = run_cli("synth --config run.json --out a.csv", dir);
    REQUIRE(from_json.exit_code == 0);
    CHECK(printed_value(from_json.out, "rho") == Catch::Approx(1.8184464592320668).epsilon(1e-12));

    const RunResult overridden = run_cli("synth --config run.json --epsilon 0.01 --out b.csv", dir);
    REQUIRE(overridden.exit_code == 0);
    CHECK(printed_value(overridden.out, "rho") == Catch::Approx(2.9932228461263809).epsilon(1e-12));

    {
        std::ofstream ini(dir / "run.cfg");
        ini << "# shallow well\nepsilon = 0.1\nN = 1\n";
    }
    const RunResult from_ini = run_cli("synth --config run.cfg --out c.csv", dir);
    REQUIRE(from_ini.exit_code == 0);
    CHECK(printed_value(from_ini.out, "rho") == Catch::Approx(1.8184464592320668).epsilon(1e-12));

    {
        std::ofstream bad(dir / "bad.json");
        bad << "{\"no_such_key\": 1}\n";
    }
    CHECK(run_cli("synth --config bad.json", dir).exit_code == 2);
    CHECK(run_cli("synth --config missing.json", dir).exit_code == 3);
}

TEST_CASE("thread environment fallback leaves results unchanged") {
    const fs::path dir = fresh_dir("threads_env");
    REQUIRE(run_cli("spectrum --N 10 --points 21 --threads 1 --out serial.csv", dir).exit_code == 0);
    const RunResult env =
        run_cli("spectrum --N 10 --points 21 --out env.csv", dir, "SUSY_CRYSTAL_THREADS=2");
    REQUIRE(env.exit_code == 0);
    CHECK(slurp(dir / "serial.csv") == slurp(dir / "env.csv"));
    const RunResult fallback = run_cli("spectrum --N 10 --points 21 --out hw.csv", dir);
    REQUIRE(fallback.exit_code == 0);
    CHECK(slurp(dir / "serial.csv") == slurp(dir / "hw.csv"));
}

TEST_CASE("bad flags exit with code 2") {
    const fs::path dir = fresh_dir("badflags");
    CHECK(run_cli("spectrum --profile sombrero", dir).exit_code == 2);
    CHECK(run_cli("spectrum --method magic", dir).exit_code == 2);
    CHECK(run_cli("spectrum --format yaml", dir).exit_code == 2);
    CHECK(run_cli("nonsense", dir).exit_code == 2);
}
