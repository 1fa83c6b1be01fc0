#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

// run the installed binary, capturing stdout (stderr is discarded)
RunResult run(const std::string& args) {
    std::string cmd = std::string(KINLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("specfun eval prints the z = 0 limit of tricomi U") {
    RunResult r = run("specfun eval --fn tricomi-u --a -0.1666666667 --b 0.6666666667 --z 0");
    CHECK(r.exit_code == 0);
    // Gamma(1/3)/Gamma(1/6) with the flag-precision parameters
    CHECK(std::abs(std::stod(r.out) - 0.48127676076079076) < 1e-8);
}

TEST_CASE("exit codes: 0 success, 1 validation, 2 numerical") {
    CHECK(run("specfun eval --fn gamma --x 0.5").exit_code == 0);
    CHECK(run("--help").exit_code == 0);
    CHECK(run("specfun eval --fn no-such-fn").exit_code == 1);
    CHECK(run("specfun eval --fn gamma --x -2").exit_code == 1);  // gamma pole
    CHECK(run("nonsense-subcommand").exit_code == 1);
    // every path times out at this horizon: numerical failure
    CHECK(run("mc estimate --x 1 --v -1 --g one --n 200 --horizon 0.001").exit_code == 2);
}

TEST_CASE("identical seed and config give byte-identical output files") {
    std::string base = "mc estimate --x 1 --v -1 --g v --n 2000 --box-x 4 --box-v 4 "
                       "--no-timestamp --out /tmp/kinlab_det.json --seed ";
    CHECK(run(base + "12").exit_code == 0);
    std::string a = slurp("/tmp/kinlab_det.json");
    CHECK(run(base + "12").exit_code == 0);
    CHECK(slurp("/tmp/kinlab_det.json") == a);
    CHECK(a.find("\"schema\": 1") != std::string::npos);
    CHECK(a.find("\"timestamp\"") == std::string::npos);

    CHECK(run(base + "13").exit_code == 0);
    CHECK(slurp("/tmp/kinlab_det.json") != a);
}

TEST_CASE("flags override config file values which override defaults") {
    {
        std::ofstream f("/tmp/kinlab_cfg.json");
        f << "{\"n\": 3000, \"g\": \"v\", \"box-x\": 4.0, \"box-v\": 4.0}\n";
    }
    RunResult r = run("mc estimate --config /tmp/kinlab_cfg.json --x 1 --v -1 --n 500 "
                      "--no-timestamp");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"n\": 500") != std::string::npos);     // flag wins
    CHECK(r.out.find("\"g\": \"v\"") != std::string::npos);   // file beats default
    CHECK(run("mc estimate --config /tmp/kinlab_cfg.json --x 1 --v -1 "
              "--no-timestamp").out.find("\"n\": 3000") != std::string::npos);
    {
        std::ofstream f("/tmp/kinlab_cfg_bad.json");
        f << "{\"not_a_key\": 1}\n";
    }
    CHECK(run("mc estimate --config /tmp/kinlab_cfg_bad.json").exit_code == 1);
}

TEST_CASE("emitted field CSV round-trips into the probe subcommands") {
    CHECK(run("fd solve --Nx 32 --Nv 32 --bc inflow --data quad --no-timestamp "
              "--out /tmp/kinlab_field.csv").exit_code == 0);
    std::string csv = slurp("/tmp/kinlab_field.csv");
    CHECK(csv.find("# schema=1") == 0);
    CHECK(csv.find("x,v,value\n") != std::string::npos);

    RunResult h = run("probe harnack --field /tmp/kinlab_field.csv --x0 0.5 --v0 0 --R 0.5");
    CHECK(h.exit_code == 0);
    CHECK(std::stod(h.out) > 0.5);

    RunResult e = run("probe holder --field /tmp/kinlab_field.csv --x0 0.5 --v0 0 "
                      "--scales 0.4,0.3,0.22,0.16 --no-timestamp");
    CHECK(e.exit_code == 0);
    CHECK(e.out.find("alpha_hat") != std::string::npos);
}

TEST_CASE("solutions tabulate emits envelope ratios inside the frozen band") {
    RunResult r = run("solutions tabulate --family phi --m 0 --grid default --no-timestamp");
    CHECK(r.exit_code == 0);
    std::istringstream is(r.out);
    std::string line;
    int rows = 0;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            CHECK(line == "family,index,x,v,value,region,envelope,ratio");
            header = true;
            continue;
        }
        ++rows;
        double ratio = std::stod(line.substr(line.rfind(',') + 1));
        CHECK(ratio > 0.1);
        CHECK(ratio < 10.0);
    }
    CHECK(rows == 63);  // 3 region points per dyadic scale, k = 0..20
}

TEST_CASE("probe holder scale table has the r,osc,fit layout") {
    CHECK(run("probe holder --target phi0 --x0 0 --v0 0 --no-timestamp "
              "--table /tmp/kinlab_scales.csv --out /tmp/kinlab_holder.json").exit_code == 0);
    std::string t = slurp("/tmp/kinlab_scales.csv");
    CHECK(t.find("r,osc,fit\n") != std::string::npos);
    std::string j = slurp("/tmp/kinlab_holder.json");
    // phi0 at the grazing origin: the critical exponent 1/2
    auto pos = j.find("\"alpha_hat\": ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::abs(std::stod(j.substr(pos + 13)) - 0.5) < 0.05);
}

TEST_CASE("report subcommand emits the criteria table") {
    RunResult r = run("report grazing --criteria 1,3,10 --no-timestamp");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("criterion  1") != std::string::npos);
    CHECK(r.out.find("criterion 10") != std::string::npos);
    CHECK(r.out.find("[PASS]") != std::string::npos);
    CHECK(r.out.find("[FAIL]") == std::string::npos);
}
