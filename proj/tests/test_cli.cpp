#include "doctest.h"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef _WIN32
#include <sys/wait.h>
#endif

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("levalarm_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args, const std::string& stdout_file = "") {
    const fs::path out = stdout_file.empty() ? work_dir() / "stdout.txt" : work_dir() / stdout_file;
    const std::string cmd = std::string("\"") + LEVALARM_CLI_PATH + "\" " + args + " > \"" + out.string() +
                            "\" 2> \"" + (work_dir() / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
#ifdef _WIN32
    return status;
#else
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

std::string path_arg(const std::string& name) { return "\"" + (work_dir() / name).string() + "\""; }

void write_dec13_model() {
    write_file(work_dir() / "dec13.json",
               R"({"firm": "test", "reference_date": "2013-12-31", "nu": -0.5080, "sigma": 0.2974,
                   "r": 0.0013, "A0": 292977497, "D0": 157550000})");
}

std::string iso(std::chrono::sys_days d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

// 300 daily observations of an equity value whose asset process is lognormal.
void write_market_files(bool drop_equity_column = false) {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> z;
    const double dt = 1.0 / 252.0, sigma = 0.3, nu = 0.1, debt = 100.0;
    double a = 200.0;
    std::ostringstream eq, idx;
    eq << (drop_equity_column ? "date,value\n" : "date,equity_value\n");
    idx << "date,return\n";
    auto day = std::chrono::sys_days{std::chrono::year{2012} / 1 / 2};
    for (int i = 0; i < 300; ++i) {
        const double e = std::max(a - debt, 1e-3);
        eq << iso(day) << "," << e << "\n";
        idx << iso(day) << "," << 0.01 * z(rng) << "\n";
        a *= std::exp((nu - 0.5 * sigma * sigma) * dt + sigma * std::sqrt(dt) * z(rng));
        day += std::chrono::days{1};
    }
    write_file(work_dir() / "equity.csv", eq.str());
    write_file(work_dir() / "index.csv", idx.str());
    write_file(work_dir() / "debt.csv", "date,debt_value\n2011-12-31,100\n2013-12-31,100\n");
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze writes a report with the one-year rows") {
    write_dec13_model();
    REQUIRE(run("analyze --model " + path_arg("dec13.json") + " --rstar 1.25,1.67 --t 0.25,1 --out " +
                path_arg("report.json") + " --csv " + path_arg("report.csv")) == 0);
    const auto j = nlohmann::json::parse(slurp(work_dir() / "report.json"));
    CHECK(j["metadata"]["firm"] == "test");
    const auto& rows = j["tables"][0]["rows"];
    REQUIRE(rows.size() == 4);
    CHECK(rows[1]["t"].get<double>() == 1.0);
    CHECK(std::abs(rows[1]["lp_interval"].get<double>() - 0.5725) < 2e-3);
    CHECK(std::abs(rows[1]["first_passage_cdf"].get<double>() - 0.4467) < 2e-3);
    CHECK(std::abs(rows[2]["q_joint_prob"].get<double>() - 0.3561) < 2e-3);
    CHECK(std::abs(rows[2]["occupancy_prob"].get<double>() - 0.5522) < 2e-3);
    const std::string csv = slurp(work_dir() / "report.csv");
    CHECK(csv.rfind("rstar,alpha,t,", 0) == 0);

    // deterministic down to the byte
    REQUIRE(run("analyze --model " + path_arg("dec13.json") + " --rstar 1.25,1.67 --t 0.25,1 --out " +
                path_arg("report2.json")) == 0);
    CHECK(slurp(work_dir() / "report.json") == slurp(work_dir() / "report2.json"));
}

TEST_CASE("density curve integrates to the non-atomic mass") {
    // negative drift, alarm above the start: atom plus density mass is one
    write_dec13_model();
    REQUIRE(run("density --model " + path_arg("dec13.json") +
                " --rstar 2.2 --kind last-passage --points 4000 --t-min 1e-6 --t-max 200 --out " +
                path_arg("lp.csv")) == 0);
    std::ifstream f(work_dir() / "lp.csv");
    std::string line;
    std::getline(f, line);
    CHECK(line == "t,value");
    std::vector<double> t, v;
    while (std::getline(f, line)) {
        const auto comma = line.find(',');
        // strtod, not stod: subnormal values are valid output
        t.push_back(std::strtod(line.substr(0, comma).c_str(), nullptr));
        v.push_back(std::strtod(line.substr(comma + 1).c_str(), nullptr));
    }
    REQUIRE(t.size() == 4000);
    double area = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) area += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    REQUIRE(run("analyze --model " + path_arg("dec13.json") + " --rstar 2.2 --t 1 --out " + path_arg("atom.json")) ==
            0);
    const auto j = nlohmann::json::parse(slurp(work_dir() / "atom.json"));
    const double atom = j["tables"][0]["rows"][0]["lp_atom"].get<double>();
    CHECK(std::abs(area - (1.0 - atom)) < 1e-3);

    REQUIRE(run("density --model " + path_arg("dec13.json") + " --rstar 1.25 --kind time-to-default --out " +
                path_arg("ttd.csv")) == 0);
    CHECK(slurp(work_dir() / "ttd.csv").rfind("t,value\n", 0) == 0);
}

TEST_CASE("optimize reports the alarm level") {
    write_dec13_model();
    REQUIRE(run("optimize --model " + path_arg("dec13.json") + " --gamma 0.4 --q 0.3006 --t 1 --out " +
                path_arg("opt.json")) == 0);
    const auto j = nlohmann::json::parse(slurp(work_dir() / "opt.json"));
    const auto& row = j["tables"][0]["rows"][0];
    CHECK(std::abs(row["alpha_star"].get<double>() + 0.2367) < 1e-3);
    CHECK(std::abs(row["rstar"].get<double>() - 1.7332) < 1e-3);

    REQUIRE(run("optimize --model " + path_arg("dec13.json") + " --q 0.3006 --gamma-sweep 0.3:0.5:0.05 --csv " +
                path_arg("sweep.csv") + " --out " + path_arg("sweep.json")) == 0);
    const auto s = nlohmann::json::parse(slurp(work_dir() / "sweep.json"));
    CHECK(s["tables"][0]["rows"].size() == 5);

    CHECK(run("optimize --model " + path_arg("dec13.json") + " --q 0.3 --wacc-inputs x.csv") == 2);
    CHECK(run("optimize --model " + path_arg("dec13.json") + " --gamma 1.5 --q 0.3") == 2);
}

TEST_CASE("wacc from flags and from a file agree") {
    REQUIRE(run("wacc --equity 135.43 --debt 157.55 --prior-debt 117.05 --interest 18.95 --rf 0.0013"
                " --rm 0.3832 --beta 1.42603 --out " +
                path_arg("w1.json")) == 0);
    write_file(work_dir() / "wacc.csv",
               "field,value\nequity_value,135.43\ndebt_value,157.55\nprior_debt_value,117.05\n"
               "interest_paid,18.95\nrisk_free,0.0013\nindex_annual_return,0.3832\nbeta,1.42603\n");
    REQUIRE(run("wacc --inputs " + path_arg("wacc.csv") + " --out " + path_arg("w2.json")) == 0);
    CHECK(slurp(work_dir() / "w1.json") == slurp(work_dir() / "w2.json"));
    const auto j = nlohmann::json::parse(slurp(work_dir() / "w1.json"));
    CHECK(std::abs(j["q"].get<double>() - 0.300572) < 5e-4);

    write_file(work_dir() / "wacc_bad.csv", "field,value\nequity_value,abc\n");
    CHECK(run("wacc --inputs " + path_arg("wacc_bad.csv")) == 2);
    CHECK(slurp(work_dir() / "stderr.txt").find("wacc_bad.csv:2") != std::string::npos);
}

TEST_CASE("calibrate builds a model file") {
    write_market_files();
    REQUIRE(run("calibrate --equity " + path_arg("equity.csv") + " --debt " + path_arg("debt.csv") + " --index " +
                path_arg("index.csv") + " --risk-free 0.01 --firm synth --out " + path_arg("model.json")) == 0);
    const auto j = nlohmann::json::parse(slurp(work_dir() / "model.json"));
    CHECK(j["firm"] == "synth");
    CHECK(std::abs(j["sigma"].get<double>() - 0.3) < 0.08);
    CHECK(j.contains("beta"));
    // the produced file is accepted by the other commands
    CHECK(run("analyze --model " + path_arg("model.json") + " --rstar 1.5 --t 1") == 0);
}

TEST_CASE("exit codes") {
    write_market_files(true);
    CHECK(run("calibrate --equity " + path_arg("equity.csv") + " --debt " + path_arg("debt.csv") +
              " --risk-free 0.01") == 2);
    CHECK(slurp(work_dir() / "stderr.txt").find("equity_value") != std::string::npos);

    write_market_files();
    CHECK(run("calibrate --equity " + path_arg("equity.csv") + " --debt " + path_arg("debt.csv") +
              " --risk-free 0.01 --window 30") == 2);
    CHECK(run("calibrate --equity " + path_arg("equity.csv") + " --debt " + path_arg("debt.csv") +
              " --risk-free 0.01 --max-iter 1") == 3);

    CHECK(run("analyze --model " + path_arg("missing.json")) == 2);
    write_file(work_dir() / "partial.json", R"({"nu": 0.1, "sigma": 0.3})");
    CHECK(run("analyze --model " + path_arg("partial.json")) == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("--help") == 0);
}

}  // TEST_SUITE
