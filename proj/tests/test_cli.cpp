#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef FASTDIFF_BIN
#define FASTDIFF_BIN "fastdiff"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd =
        std::string(FASTDIFF_BIN) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    return RunResult{WEXITSTATUS(rc), slurp(out), slurp(err)};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fastdiff_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& content) {
    std::ofstream f(p);
    f << content;
}

} // namespace

TEST_CASE("constants subcommand emits the derived values") {
    const fs::path dir = fresh_dir("constants");
    const RunResult r = run_cli("constants --n 3 --m 0.2 --rho1 1 --beta 5", dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"alpha\": 13.75") != std::string::npos);
    CHECK(r.out.find("\"Cstar\": 0.19999999999999996") != std::string::npos);
    CHECK(r.out.find("\"regime\": \"real-roots\"") != std::string::npos);
}

TEST_CASE("config errors name the offending field and exit 1") {
    const fs::path dir = fresh_dir("badcfg");
    write(dir / "cfg.json", R"({"params":{"n":3,"rho1":1,"beta":5}})");
    const RunResult r = run_cli("constants --config " + (dir / "cfg.json").string(), dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("'m'") != std::string::npos);

    write(dir / "range.json", R"({"params":{"n":3,"m":0.2,"rho1":1,"beta":0.4}})");
    const RunResult r2 = run_cli("constants --config " + (dir / "range.json").string(), dir);
    CHECK(r2.exit_code == 1);
    CHECK(r2.err.find("beta") != std::string::npos);
}

TEST_CASE("profile --invert outside the inversion exponent exits 1") {
    const fs::path dir = fresh_dir("invert");
    write(dir / "cfg.json",
          R"({"params":{"n":3,"m":0.25,"rho1":1,"beta":5},"kind":"regular",
              "grid":{"s_min":-4,"s_max":4,"nodes":201},"tol":1e-8,"invert":true})");
    const RunResult r = run_cli("profile --config " + (dir / "cfg.json").string(), dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("(n-2)/(n+2)") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const fs::path dir = fresh_dir("determinism");
    write(dir / "cfg.json",
          R"({"params":{"n":3,"m":0.2,"rho1":1,"beta":5},"kind":"cylinder",
              "grid":{"s_min":-3,"s_max":3,"nodes":1000}})");
    const RunResult r1 = run_cli("profile --config " + (dir / "cfg.json").string() + " --out " +
                                     (dir / "a").string() + " --seed 42",
                                 dir);
    const RunResult r2 = run_cli("profile --config " + (dir / "cfg.json").string() + " --out " +
                                     (dir / "b").string() + " --seed 42",
                                 dir);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(dir / "a" / "profile.csv") == slurp(dir / "b" / "profile.csv"));
    CHECK(slurp(dir / "a" / "checks.json") == slurp(dir / "b" / "checks.json"));
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
    CHECK(!slurp(dir / "a" / "profile.csv").empty());
}

TEST_CASE("asympt refuses sub-threshold beta when second order is required") {
    const fs::path dir = fresh_dir("regime");
    write(dir / "cfg.json",
          R"({"params":{"n":3,"m":0.2,"rho1":1,"beta":5},"kind":"regular",
              "grid":{"s_min":-4,"s_max":20,"nodes":1201},"require_second_order":true})");
    const RunResult r = run_cli("asympt --config " + (dir / "cfg.json").string(), dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("beta2") != std::string::npos);
}

TEST_CASE("simulate: smoke run writes histories and a summary") {
    const fs::path dir = fresh_dir("simulate");
    write(dir / "cfg.json", R"({
        "params":{"n":3,"m":0.2,"rho1":1,"beta":5,"lambda":1},
        "T":1.0,"scenario":"psi",
        "domain":{"r_core":1e-3,"r_max":160.0,"cells":150},
        "time":{"s_end":0.3,"dt_factor":0.004,"snapshot_ds":0.05},
        "window":{"y_lo":0.05,"y_hi":1.5,"cells":100,"compact":[0.25,1.5]}})");
    const RunResult r = run_cli("simulate --config " + (dir / "cfg.json").string() +
                                    " --out " + (dir / "out").string(),
                                dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"stationary\": true") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "histories.csv"));
    CHECK(fs::exists(dir / "out" / "snapshot_last.csv"));
    CHECK(fs::exists(dir / "out" / "summary.json"));
    CHECK(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("simulate: Newton divergence surfaces as a numerical failure (exit 2)") {
    const fs::path dir = fresh_dir("newton");
    write(dir / "cfg.json", R"({
        "params":{"n":3,"m":0.2,"rho1":1,"beta":5,"lambda":1},
        "T":1.0,"scenario":"psi",
        "domain":{"r_core":1e-3,"r_max":160.0,"cells":150},
        "time":{"s_end":0.3,"dt_factor":0.5,"snapshot_ds":0.05},
        "window":{"y_lo":0.05,"y_hi":1.5,"cells":100,"compact":[0.25,1.5]},
        "controls":{"max_newton":2}})");
    const RunResult r = run_cli("simulate --config " + (dir / "cfg.json").string(), dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("try dt") != std::string::npos);
}
