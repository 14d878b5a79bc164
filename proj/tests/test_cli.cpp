// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "doctest.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = SPSS_CLI_PATH;
const fs::path kConfigs = SPSS_CONFIG_DIR;

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run run(const std::string& args, const fs::path& scratch)
{
    const fs::path err = scratch / "stderr.txt";
    const std::string cmd = kCli + " " + args + " 2>" + err.string();
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

// Value printed as "key value" by the CLI.
double value(const std::string& out, const std::string& key)
{
    std::istringstream in(out);
    std::string k;
    double v;
    while (in >> k) {
        if (k == key && in >> v) return v;
        in.ignore(1 << 20, '\n');
    }
    FAIL("key not printed: " << key);
    return 0.0;
}

class Scratch {
public:
    explicit Scratch(const std::string& name) : dir_(fs::temp_directory_path() / ("spss_cli_" + name))
    {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }
    const fs::path& dir() const { return dir_; }
    fs::path operator/(const std::string& s) const { return dir_ / s; }

    // Writes a variant of a shipped config; returns its path.
    fs::path config(const std::string& base, const std::function<void(json&)>& edit, const std::string& name) const
    {
        json j = json::parse(slurp(kConfigs / base));
        edit(j);
        const fs::path p = dir_ / name;
        std::ofstream(p) << j.dump(2);
        return p;
    }

private:
    fs::path dir_;
};

const std::string kSmall = (kConfigs / "degenerate_5x5.json").string();

} // namespace

TEST_CASE("configuration errors exit with 2")
{
    Scratch s("config");
    const auto unknown = s.config("degenerate_5x5.json", [](json& j) { j["ipt"]["speed"] = 3; }, "unknown.json");
    auto r = run("train --config " + unknown.string() + " --out " + (s / "o").string(), s.dir());
    CHECK(r.code == 2);
    CHECK(r.err.find("ipt.speed") != std::string::npos);

    const auto b1 = s.config("degenerate_5x5.json", [](json& j) { j["surrogate"]["B"] = 1; }, "b1.json");
    r = run("train --config " + b1.string() + " --out " + (s / "o").string(), s.dir());
    CHECK(r.code == 2);
    CHECK(r.err.find("surrogate.B") != std::string::npos);

    const auto noseed = s.config("degenerate_5x5.json", [](json& j) { j["sbd"].erase("seed"); }, "noseed.json");
    r = run("synthesize --config " + noseed.string() + " --out " + (s / "o").string(), s.dir());
    CHECK(r.code == 2);
    CHECK(r.err.find("sbd.seed") != std::string::npos);

    std::ofstream(s / "broken.json") << "{\"wave\": ";
    r = run("synthesize --config " + (s / "broken.json").string() + " --out " + (s / "o").string(), s.dir());
    CHECK(r.code == 2);

    r = run("synthesize --out " + (s / "o").string(), s.dir());
    CHECK(r.code == 2);
    r = run("frobnicate", s.dir());
    CHECK(r.code == 2);
}

TEST_CASE("missing model exits with 4 and names the path")
{
    Scratch s("model");
    const auto krig = s.config("degenerate_5x5.json", [](json& j) { j["surrogate"]["twin"] = "kriging"; }, "k.json");
    const std::string missing = (s / "no_such_model.json").string();
    auto r = run("synthesize --config " + krig.string() + " --model " + missing + " --out " + (s / "o").string(),
                 s.dir());
    CHECK(r.code == 4);
    CHECK(r.err.find(missing) != std::string::npos);
    r = run("synthesize --config " + krig.string() + " --out " + (s / "o").string(), s.dir());
    CHECK(r.code == 4);
}

TEST_CASE("train, then synthesize with the kriging twin")
{
    Scratch s("train");
    const auto cfg = s.config("degenerate_5x5.json",
                              [](json& j) {
                                  j["surrogate"]["twin"] = "kriging";
                                  j["surrogate"]["B"] = 60;
                                  j["sbd"]["N"] = 20;
                              },
                              "k.json");
    auto r = run("train --config " + cfg.string() + " --out " + (s / "m1").string(), s.dir());
    REQUIRE(r.code == 0);
    CHECK(value(r.out, "max_interp_error") <= 1e-6);
    CHECK(fs::exists(s / "m1" / "model.json"));
    CHECK(fs::exists(s / "m1" / "training_set" / "records.csv"));
    r = run("train --config " + cfg.string() + " --out " + (s / "m2").string(), s.dir());
    REQUIRE(r.code == 0);
    CHECK(slurp(s / "m1" / "model.json") == slurp(s / "m2" / "model.json"));

    r = run("synthesize --config " + cfg.string() + " --model " + (s / "m1" / "model.json").string() + " --out " +
                (s / "syn").string(),
            s.dir());
    CHECK(r.code == 0);

    // model trained for another window size
    const auto other = s.config("degenerate_5x5.json",
                                [](json& j) {
                                    j["surrogate"]["twin"] = "kriging";
                                    j["surrogate"]["Pp"] = 3;
                                    j["surrogate"]["Qp"] = 3;
                                },
                                "other.json");
    r = run("synthesize --config " + other.string() + " --model " + (s / "m1" / "model.json").string() + " --out " +
                (s / "bad").string(),
            s.dir());
    CHECK(r.code == 4);

    std::ofstream(s / "junk.json") << "{ not json";
    r = run("synthesize --config " + cfg.string() + " --model " + (s / "junk.json").string() + " --out " +
                (s / "bad").string(),
            s.dir());
    CHECK(r.code == 5);
}

TEST_CASE("synthesize, evaluate, footprint and report")
{
    Scratch s("pipeline");
    auto r = run("synthesize --config " + kSmall + " --out " + (s / "syn").string() + " --threads 1", s.dir());
    REQUIRE(r.code == 0);
    for (const char* f : {"report.json", "layout.csv", "currents_ref.csv", "currents_achieved.csv", "farfield.csv",
                          "footprint.csv", "delta_trace.csv", "gamma_trace.csv", "manifest.json"})
        CHECK(fs::exists(s / "syn" / f));
    const double xi = value(r.out, "xi_pen_db");

    // round trip through the saved layout
    auto e = run("evaluate --config " + kSmall + " " + (s / "syn" / "layout.csv").string() + " --out " +
                     (s / "ev").string(),
                 s.dir());
    REQUIRE(e.code == 0);
    CHECK(value(e.out, "xi_pen_db") == xi);
    CHECK(e.err.find("config hash") == std::string::npos);

    const json report = json::parse(slurp(s / "syn" / "report.json"));
    CHECK(report.dump().find("xi_pen_db") != std::string::npos);

    auto f = run("footprint --config " + kSmall + " " + (s / "syn" / "layout.csv").string() + " --out " +
                     (s / "fp").string(),
                 s.dir());
    CHECK(f.code == 0);
    CHECK(fs::exists(s / "fp" / "footprint.csv"));

    auto rep = run("report " + (s / "syn").string(), s.dir());
    CHECK(rep.code == 0);
    CHECK(value(rep.out, "xi_pen_db") == xi);
    const json index = json::parse(slurp(s / "syn" / "index.json"));
    CHECK(index.contains("tables"));

    // tampering is detected
    std::ofstream(s / "syn" / "farfield.csv", std::ios::app) << "0,0\n";
    rep = run("report " + (s / "syn").string(), s.dir());
    CHECK(rep.code == 5);
}

TEST_CASE("layout errors exit with 5 and point at the row")
{
    Scratch s("layout");
    auto r = run("synthesize --config " + kSmall + " --out " + (s / "syn").string(), s.dir());
    REQUIRE(r.code == 0);
    const std::string csv = slurp(s / "syn" / "layout.csv");

    std::ofstream(s / "short.csv") << csv.substr(0, csv.find('\n', csv.size() / 2) + 1) << "7,2\n";
    auto e = run("evaluate --config " + kSmall + " " + (s / "short.csv").string() + " --out " + (s / "e").string(),
                 s.dir());
    CHECK(e.code == 5);
    CHECK(e.err.find("line") != std::string::npos);

    std::ofstream(s / "few.csv") << csv.substr(0, csv.find('\n', csv.size() / 2) + 1);
    e = run("evaluate --config " + kSmall + " " + (s / "few.csv").string() + " --out " + (s / "e").string(), s.dir());
    CHECK(e.code == 5);

    const auto big = (kConfigs / "pencil_15x15_oracle.json").string();
    e = run("evaluate --config " + big + " " + (s / "syn" / "layout.csv").string() + " --out " + (s / "e").string(),
            s.dir());
    CHECK(e.code == 5);
}

TEST_CASE("uniform layout evaluates")
{
    Scratch s("uniform");
    std::ofstream csv(s / "uniform.csv");
    csv << "p,q,d,value\n";
    for (int q = 1; q <= 5; ++q)
        for (int p = 1; p <= 5; ++p) csv << p << "," << q << ",1,0.02\n";
    csv.close();
    const auto r =
        run("evaluate --config " + kSmall + " " + (s / "uniform.csv").string() + " --out " + (s / "e").string(), s.dir());
    CHECK(r.code == 0);
    // specular (broadside) beam for a uniform sheet under broadside incidence
    CHECK(value(r.out, "peak_theta_deg") <= 5.0);
}

TEST_CASE("same config, same artifacts; seed override changes them")
{
    Scratch s("determinism");
    REQUIRE(run("synthesize --config " + kSmall + " --out " + (s / "a").string(), s.dir()).code == 0);
    REQUIRE(run("synthesize --config " + kSmall + " --out " + (s / "b").string(), s.dir()).code == 0);
    const json ma = json::parse(slurp(s / "a" / "manifest.json")), mb = json::parse(slurp(s / "b" / "manifest.json"));
    CHECK(ma["artifacts"] == mb["artifacts"]);
    CHECK(ma["config_hash"] == mb["config_hash"]);
    for (const auto& [name, hash] : ma["artifacts"].items()) CHECK(slurp(s / "a" / name) == slurp(s / "b" / name));

    REQUIRE(run("synthesize --config " + kSmall + " --seed-override 99 --out " + (s / "c").string(), s.dir()).code ==
            0);
    const json mc = json::parse(slurp(s / "c" / "manifest.json"));
    CHECK(mc["artifacts"]["layout.csv"] != ma["artifacts"]["layout.csv"]);
}

TEST_CASE("floats carry 17 significant digits")
{
    Scratch s("digits");
    REQUIRE(run("synthesize --config " + kSmall + " --out " + (s / "a").string(), s.dir()).code == 0);
    std::istringstream in(slurp(s / "a" / "layout.csv"));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    const std::string v = line.substr(line.rfind(',') + 1);
    CHECK(std::stod(v) > 0.0);
    int digits = 0;
    for (char c : v.substr(0, v.find_first_of("eE")))
        if (std::isdigit(static_cast<unsigned char>(c))) ++digits;
    // leading "0." is not significant
    CHECK(digits >= 17);
}

TEST_CASE("shaped scenario synthesises")
{
    Scratch s("shaped");
    const auto cfg = s.config("shaped_two_squares.json",
                              [](json& j) {
                                  j["lattice"]["P"] = 8;
                                  j["lattice"]["Q"] = 8;
                                  j["sbd"]["N"] = 10;
                                  j["ipt"]["I"] = 20;
                                  j["surrogate"]["twin"] = "oracle";
                              },
                              "shaped.json");
    const auto r = run("synthesize --config " + cfg.string() + " --out " + (s / "o").string(), s.dir());
    CHECK(r.code == 0);
    CHECK(r.out.find("objective shaped") != std::string::npos);
    CHECK(r.out.find("xi_sha_db") != std::string::npos);
}

TEST_CASE("help and version")
{
    Scratch s("help");
    CHECK(run("--help", s.dir()).code == 0);
    const auto v = run("--version", s.dir());
    CHECK(v.code == 0);
    CHECK(!v.out.empty());
}
