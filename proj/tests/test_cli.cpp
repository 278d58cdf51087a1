#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "json.hpp"
#include "qrabi/analytic.hpp"
#include "qrabi/cli.hpp"
#include "qrabi/io.hpp"

using namespace qrabi;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("qrabi_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

json load_schema(const char* name) {
    return json::parse(
        slurp(fs::path(QRABI_SOURCE_DIR) / "docs" / "schemas" / name));
}

bool type_matches(const std::string& type, const json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    return false;
}

// Validates a document against the subset of JSON Schema the shipped
// descriptions use: type, enum, required, properties, items, and
// additionalProperties (false or a sub-schema).
void check_schema(const json& schema, const json& v, const std::string& where,
                  std::vector<std::string>& errors) {
    if (schema.contains("type") &&
        !type_matches(schema["type"].get<std::string>(), v))
        errors.push_back(where + ": expected type " +
                         schema["type"].get<std::string>());
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& e : schema["enum"]) hit = hit || e == v;
        if (!hit) errors.push_back(where + ": value not in enum");
    }
    if (v.is_object()) {
        if (schema.contains("required"))
            for (const auto& k : schema["required"])
                if (!v.contains(k.get<std::string>()))
                    errors.push_back(where + ": missing required key " +
                                     k.get<std::string>());
        const json props =
            schema.contains("properties") ? schema["properties"] : json::object();
        for (const auto& item : v.items()) {
            if (props.contains(item.key())) {
                check_schema(props[item.key()], item.value(),
                             where + "." + item.key(), errors);
            } else if (schema.contains("additionalProperties")) {
                const json& ap = schema["additionalProperties"];
                if (ap.is_boolean() && !ap.get<bool>())
                    errors.push_back(where + ": unexpected key " + item.key());
                else if (ap.is_object())
                    check_schema(ap, item.value(), where + "." + item.key(),
                                 errors);
            }
        }
    }
    if (v.is_array() && schema.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i)
            check_schema(schema["items"], v[i],
                         where + "[" + std::to_string(i) + "]", errors);
}

void require_valid(const char* schema_name, const json& doc) {
    std::vector<std::string> errors;
    check_schema(load_schema(schema_name), doc, "$", errors);
    for (const auto& e : errors) MESSAGE(e);
    REQUIRE(errors.empty());
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace

TEST_CASE("parse_range handles scalars, steps, and the half-step stop rule") {
    CHECK(parse_range("1.5") == std::vector<double>{1.5});
    CHECK(parse_range("-2") == std::vector<double>{-2.0});
    CHECK(parse_range("0:2:1") == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(parse_range("5:5:1") == std::vector<double>{5.0});

    // stop is included when it lies within half a step of the last grid point
    const std::vector<double> r = parse_range("0:1:0.3");
    REQUIRE(r.size() == 4);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.3);
    CHECK(r[2] == doctest::Approx(0.6));
    CHECK(r[3] == doctest::Approx(0.9));

    // ... and excluded when the last point falls short by more than half a step
    const std::vector<double> s = parse_range("0:0.94:0.1");
    REQUIRE(s.size() == 10);
    CHECK(s.back() == doctest::Approx(0.9));

    CHECK_THROWS_AS(parse_range("0.5:2:bad"), ConfigError);
    CHECK_THROWS_AS(parse_range("abc"), ConfigError);
    CHECK_THROWS_AS(parse_range("1.5x"), ConfigError);
    CHECK_THROWS_AS(parse_range(""), ConfigError);
    CHECK_THROWS_AS(parse_range("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_range("1:2:3:4"), ConfigError);
    CHECK_THROWS_AS(parse_range("0:1:0"), ConfigError);
    CHECK_THROWS_AS(parse_range("0:1:-0.5"), ConfigError);
    CHECK_THROWS_AS(parse_range("2:0:0.5"), ConfigError);
}

TEST_CASE("parse_value_list splices scalars and ranges") {
    CHECK(parse_value_list("25,50,100:400:100") ==
          std::vector<double>{25.0, 50.0, 100.0, 200.0, 300.0, 400.0});
    CHECK(parse_value_list("7") == std::vector<double>{7.0});
    CHECK_THROWS_AS(parse_value_list("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_value_list("1;2"), ConfigError);
}

TEST_CASE("phase-diagram writes the classified grid and a manifest") {
    TempDir tmp("pd");
    PhaseDiagramOptions opt;
    opt.gamma_range = parse_value_list("0.5:1.5:0.5");
    opt.R_range = parse_value_list("0:2:1");
    opt.out_dir = tmp.path.string();
    cmd_phase_diagram(opt);

    const auto lines = lines_of(slurp(tmp.path / "phase_diagram.csv"));
    REQUIRE(lines.size() == 10);
    CHECK(lines[0] == "gamma,R,label,y1,y2,energy");
    CHECK(lines[1] == "0.5,0,Normal,0,0,0");
    CHECK(lines[2] == "0.5,1,SuperradiantY2,0,1.224744871391589,-0.125");
    CHECK(lines[5] == "1,1,Normal,0,0,0");
    CHECK(lines[6] == "1,2,BoundaryU1,1.3693063937629153,0,-0.5625");
    CHECK(lines[9] == "1.5,2,SuperradiantY1,1.3693063937629153,0,-0.5625");

    // every row agrees with the classifier called directly
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> f;
        std::string cur;
        for (char c : lines[i]) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        f.push_back(cur);
        REQUIRE(f.size() == 6);
        ModelParams p;
        p.alpha = std::stod(f[0]);
        p.beta = 1.0;
        p.R = std::stod(f[1]);
        const PhaseClassification ph = classify_phase(p);
        CHECK(f[2] == to_string(ph.label));
        CHECK(std::stod(f[3]) == ph.y1);
        CHECK(std::stod(f[4]) == ph.y2);
        CHECK(std::stod(f[5]) == ph.energy);
    }

    const json mani = load_json(tmp.path / "manifest.json");
    require_valid("manifest.schema.json", mani);
    CHECK(mani["command"] == "phase-diagram");
    CHECK(mani["seed"].get<int>() == 0);
    CHECK(mani["config"]["gamma"] == "0.5,1,1.5");
    CHECK(mani["config"]["R"] == "0,1,2");
    CHECK(mani["config"]["out"] == tmp.path.string());
    CHECK_FALSE(mani.contains("command_line"));

    TempDir bad_dir("pd_bad");
    PhaseDiagramOptions bad;
    bad.out_dir = bad_dir.path.string();
    bad.R_range = {1.0};
    CHECK_THROWS_AS(cmd_phase_diagram(bad), ConfigError);  // empty gamma range
    bad.gamma_range = {0.0};
    CHECK_THROWS_AS(cmd_phase_diagram(bad), ConfigError);  // gamma must be > 0
}

TEST_CASE("mean-photon flags the U(1) boundary and honors column selection") {
    TempDir tmp("mp");
    MeanPhotonOptions opt;
    opt.alpha_range = {0.5, 1.0, 1.5};
    opt.beta = 1.0;
    opt.R_range = {1.0, 1.5};
    opt.out_dir = tmp.path.string();
    cmd_mean_photon(opt);

    const auto lines = lines_of(slurp(tmp.path / "mean_photon.csv"));
    REQUIRE(lines.size() == 7);
    CHECK(lines[0] == "gamma,R,n1_over_eta,n2_over_eta,flag");
    CHECK(lines[1] == "0.5,1,0,0.75,");
    CHECK(lines[2] == "0.5,1.5,0,2.138888888888889,");
    CHECK(lines[3] == "1,1,,,u1-boundary");
    CHECK(lines[4] == "1,1.5,,,u1-boundary");
    CHECK(lines[5] == "1.5,1,0,0,");
    CHECK(lines[6] == "1.5,1.5,0.4513888888888889,0,");
    CHECK(std::stod(lines[6].substr(8, 18)) ==
          doctest::Approx((std::pow(1.5, 4) - 1.0) / (4.0 * 1.5 * 1.5))
              .epsilon(1e-15));

    TempDir tmp2("mp_n2");
    MeanPhotonOptions sel = opt;
    sel.mode = "n2";
    sel.out_dir = tmp2.path.string();
    cmd_mean_photon(sel);
    const auto l2 = lines_of(slurp(tmp2.path / "mean_photon.csv"));
    REQUIRE(l2.size() == 7);
    CHECK(l2[0] == "gamma,R,n2_over_eta,flag");
    CHECK(l2[1] == "0.5,1,0.75,");
    CHECK(l2[3] == "1,1,,u1-boundary");
    CHECK(l2[6] == "1.5,1.5,0,");

    const json mani = load_json(tmp2.path / "manifest.json");
    require_valid("manifest.schema.json", mani);
    CHECK(mani["command"] == "mean-photon");
    CHECK(mani["config"]["mode"] == "n2");

    MeanPhotonOptions bad = opt;
    bad.mode = "photon";
    CHECK_THROWS_AS(cmd_mean_photon(bad), ConfigError);
    bad = opt;
    bad.beta = 0.0;
    CHECK_THROWS_AS(cmd_mean_photon(bad), ConfigError);
    bad = opt;
    bad.alpha_range = {0.5, -1.0};
    bad.out_dir = tmp.path.string();
    CHECK_THROWS_AS(cmd_mean_photon(bad), ConfigError);
}

TEST_CASE("solve writes a converged report that round-trips its values") {
    TempDir tmp("solve");
    SolveOptions opt;
    opt.params.alpha = 0.8;
    opt.params.beta = 1.2;
    opt.params.R = 0.745356;
    opt.params.eta = 50.0;
    opt.dump_vector = true;
    opt.out_dir = tmp.path.string();
    const GroundStateResult r = cmd_solve(opt);

    CHECK(r.converged);
    CHECK(r.energy == doctest::Approx(-0.007274990532992059).epsilon(1e-10));

    const json gs = load_json(tmp.path / "ground_state.json");
    require_valid("ground_state.schema.json", gs);
    CHECK(gs["alpha"].get<double>() == 0.8);
    CHECK(gs["beta"].get<double>() == 1.2);
    CHECK(gs["R"].get<double>() == 0.745356);
    CHECK(gs["eta"].get<double>() == 50.0);
    CHECK(gs["energy"].get<double>() == r.energy);
    CHECK(gs["n1"].get<double>() == r.n1);
    CHECK(gs["n2"].get<double>() == r.n2);
    CHECK(gs["parity"].get<double>() == r.parity);
    CHECK(gs["residual"].get<double>() == r.residual);
    CHECK(gs["tail1"].get<double>() == r.tail1);
    CHECK(gs["tail2"].get<double>() == r.tail2);
    CHECK(gs["n1_max"].get<int>() == r.trunc_used.n1_max);
    CHECK(gs["n2_max"].get<int>() == r.trunc_used.n2_max);
    CHECK(gs["iterations"].get<int>() == r.iterations);
    CHECK(gs["converged"].get<bool>());

    const auto vlines = lines_of(slurp(tmp.path / "vector.csv"));
    REQUIRE(vlines.size() == r.vector.size() + 1);
    CHECK(vlines[0] == "index,value");
    double norm2 = 0.0;
    for (std::size_t i = 1; i < vlines.size(); ++i) {
        const auto comma = vlines[i].find(',');
        REQUIRE(comma != std::string::npos);
        CHECK(std::stoul(vlines[i].substr(0, comma)) == i - 1);
        const double v = std::stod(vlines[i].substr(comma + 1));
        CHECK(v == r.vector[i - 1]);
        norm2 += v * v;
    }
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));

    const json mani = load_json(tmp.path / "manifest.json");
    require_valid("manifest.schema.json", mani);
    CHECK(mani["command"] == "solve");
    CHECK(mani["seed"].get<std::uint64_t>() == 1234);  // solver default
    CHECK(mani["config"]["R"] == "0.745356");
    CHECK(mani["config"]["dump_vector"] == "true");
    CHECK_FALSE(mani.contains("command_line"));

    SolveOptions bad = opt;
    bad.params.alpha = -1.0;
    CHECK_THROWS_AS(cmd_solve(bad), ConfigError);
}

TEST_CASE("scaling on the synthetic dataset writes a reproducible bundle") {
    const double Rc = critical_coupling(0.8, 1.2).Rc;
    ScalingOptions opt;
    opt.alpha = 0.8;
    opt.beta = 1.2;
    opt.synthetic = true;
    for (int k = 0; k < 8; ++k) opt.eta_list.push_back(25.0 * std::pow(2.0, k));
    opt.R_range = linspace(Rc - 0.008, Rc + 0.008, 201);

    TempDir t1("scal1");
    opt.out_dir = t1.path.string();
    const ScalingOutput out = cmd_scaling(opt);

    CHECK(std::abs(out.fit.Rc_est - Rc) < 1e-3);
    CHECK(std::abs(out.fit.slope + 2.0 / 3.0) < 1e-3);
    CHECK(std::abs(out.fit.nu - 1.5) < 1e-3);
    CHECK(out.fit.collapse_cost < 1e-10);

    const json rep = load_json(t1.path / "fit_report.json");
    require_valid("fit_report.schema.json", rep);
    CHECK(rep["regime"] == "mode2");
    CHECK(rep["synthetic"].get<bool>());
    CHECK(rep["alpha"].get<double>() == 0.8);
    CHECK(rep["Rc_est"].get<double>() == out.fit.Rc_est);
    CHECK(rep["slope"].get<double>() == out.fit.slope);
    CHECK(rep["nu"].get<double>() == out.fit.nu);
    CHECK(rep["kappa"].get<double>() == out.fit.kappa);
    CHECK(rep["kappa"].get<double>() ==
          -rep["slope"].get<double>() * rep["nu"].get<double>());
    CHECK(rep["eta_min"].get<double>() == out.fit.eta_min);
    CHECK(rep["n_eta"].get<int>() == 8);
    CHECK(rep["n_R"].get<int>() == 201);
    CHECK(rep["R_slices"].size() == 201);
    CHECK(rep["slice_slopes"].size() == 201);
    CHECK(rep["slice_ssr"].size() == 201);
    CHECK(rep["collapsed_y_range"].get<double>() > 0.0);
    REQUIRE(rep.contains("manifest"));
    CHECK_FALSE(rep["manifest"].contains("timestamp"));
    CHECK(rep["manifest"]["command"] == "scaling");
    CHECK(rep["manifest"]["config"]["synthetic"] == "true");

    const auto raw = lines_of(slurp(t1.path / "sweep_raw.csv"));
    REQUIRE(raw.size() == 1 + 8 * 201);
    CHECK(raw[0] == "eta,R,n_over_eta");
    const auto col = lines_of(slurp(t1.path / "collapsed.csv"));
    REQUIRE(col.size() == 1 + 8 * 201);
    CHECK(col[0] == "eta,R,x,y");

    // rerun with identical options: everything except the timestamped
    // manifest must come back byte-identical
    const std::string fit1 = slurp(t1.path / "fit_report.json");
    const std::string raw1 = slurp(t1.path / "sweep_raw.csv");
    const std::string col1 = slurp(t1.path / "collapsed.csv");
    cmd_scaling(opt);
    CHECK(slurp(t1.path / "fit_report.json") == fit1);
    CHECK(slurp(t1.path / "sweep_raw.csv") == raw1);
    CHECK(slurp(t1.path / "collapsed.csv") == col1);

    ScalingOptions bad = opt;
    bad.eta_list = {25.0, 50.0, 100.0};
    CHECK_THROWS_AS(cmd_scaling(bad), ConfigError);
    bad = opt;
    bad.R_range = {0.7, 0.75};
    CHECK_THROWS_AS(cmd_scaling(bad), ConfigError);
    bad = opt;
    bad.workers = 0;
    CHECK_THROWS_AS(cmd_scaling(bad), ConfigError);
}

TEST_CASE("sweep results are independent of the worker count") {
    ScalingOptions opt;
    opt.alpha = 0.8;
    opt.beta = 1.2;
    opt.eta_list = {25.0, 50.0, 100.0, 200.0};
    opt.R_range = {0.72, 0.745, 0.77};
    opt.workers = 1;
    const SweepDataset d1 = run_sweep(opt);
    CHECK_NOTHROW(d1.validate());
    CHECK(d1.regime == Branch::Mode2);
    REQUIRE(d1.n_over_eta.size() == 12);
    for (double v : d1.n_over_eta) {
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
    }
    // occupation at fixed eta grows across the critical region
    CHECK(d1.at(2, 3) > d1.at(0, 3));

    opt.workers = 2;
    const SweepDataset d2 = run_sweep(opt);
    CHECK(d2.n_over_eta == d1.n_over_eta);

    ScalingOptions u1 = opt;
    u1.alpha = u1.beta * u1.beta;
    CHECK_THROWS_AS(run_sweep(u1), ConfigError);

    ScalingOptions dup = opt;
    dup.eta_list = {25.0, 25.0, 50.0, 100.0};
    CHECK_THROWS_AS(run_sweep(dup), ConfigError);
}

TEST_CASE("universal-f writes the curve samples and a manifest") {
    TempDir tmp("uf");
    UniversalFOptions opt;
    opt.branch = Branch::Mode1;
    opt.rprime_range = {0.0, 10.0};
    opt.out_dir = tmp.path.string();
    cmd_universal_f(opt);

    const auto lines = lines_of(slurp(tmp.path / "universal_f.csv"));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "rprime,f");
    CHECK(lines[1].rfind("0,", 0) == 0);
    CHECK(lines[2].rfind("10,", 0) == 0);
    const double f0 = std::stod(lines[1].substr(lines[1].find(',') + 1));
    const double f10 = std::stod(lines[2].substr(lines[2].find(',') + 1));
    CHECK(f0 == doctest::Approx(0.22805997787383384).epsilon(1e-9));
    CHECK(f10 == doctest::Approx(9.920303710439054).epsilon(1e-6));

    const json mani = load_json(tmp.path / "manifest.json");
    require_valid("manifest.schema.json", mani);
    CHECK(mani["command"] == "universal-f");
    CHECK(mani["config"]["branch"] == "mode1");
    CHECK(mani["config"]["rprime"] == "0,10");
    CHECK(mani["config"]["trunc_1d"] == "160");

    UniversalFOptions bad = opt;
    bad.trunc_1d = 1;
    CHECK_THROWS_AS(cmd_universal_f(bad), ConfigError);
    bad = opt;
    bad.rprime_range.clear();
    CHECK_THROWS_AS(cmd_universal_f(bad), ConfigError);
}
