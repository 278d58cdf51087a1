#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "qrabi/cli.hpp"
#include "qrabi/io.hpp"

namespace {

std::string join_argv(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat key=value config file: one option per line, '#' comments, blank lines
// ignored. Keys are the long option names without the leading dashes.
std::map<std::string, std::string> load_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qrabi::ConfigError("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = strip(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos || strip(t.substr(0, eq)).empty())
            throw qrabi::ConfigError("config file " + path + " line " +
                                     std::to_string(lineno) +
                                     ": expected key=value");
        kv[strip(t.substr(0, eq))] = strip(t.substr(eq + 1));
    }
    return kv;
}

// Fills options the command line left unset from a flat config file;
// command-line flags win. Subcommand callbacks apply every merged key, then
// finish() rejects leftovers as unknown.
class ConfigMerge {
  public:
    ConfigMerge(const CLI::App* cmd, const std::string& path) : cmd_(cmd) {
        if (!path.empty()) kv_ = load_flat_config(path);
    }

    void apply(const std::string& key, std::string& dst) {
        if (const std::string* v = config_value(key)) dst = *v;
    }
    void apply(const std::string& key, double& dst) {
        if (const std::string* v = config_value(key)) dst = to_double(key, *v);
    }
    void apply(const std::string& key, int& dst) {
        if (const std::string* v = config_value(key))
            dst = static_cast<int>(to_int(key, *v));
    }
    void apply(const std::string& key, std::uint64_t& dst) {
        if (const std::string* v = config_value(key)) dst = to_u64(key, *v);
    }
    void apply(const std::string& key, bool& dst) {
        const std::string* v = config_value(key);
        if (!v) return;
        if (*v == "true" || *v == "1")
            dst = true;
        else if (*v == "false" || *v == "0")
            dst = false;
        else
            throw qrabi::ConfigError("config key " + key +
                                     ": expected true/false, got " + *v);
    }

    void require_present(const std::string& key) {
        seen_.insert(key);
        if (cmd_->count("--" + key) == 0 && kv_.find(key) == kv_.end())
            throw qrabi::ConfigError("--" + key +
                                     " is required (command line or config file)");
    }

    void finish() const {
        for (const auto& item : kv_)
            if (seen_.find(item.first) == seen_.end())
                throw qrabi::ConfigError("unknown config key: " + item.first);
    }

  private:
    const std::string* config_value(const std::string& key) {
        seen_.insert(key);
        const auto it = kv_.find(key);
        if (it == kv_.end()) return nullptr;
        if (cmd_->count("--" + key) > 0) return nullptr;  // command line wins
        return &it->second;
    }

    static double to_double(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw qrabi::ConfigError("config key " + key +
                                     ": cannot parse number: " + v);
        }
    }
    static long long to_int(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const long long x = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw qrabi::ConfigError("config key " + key +
                                     ": cannot parse integer: " + v);
        }
    }
    static std::uint64_t to_u64(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const std::uint64_t x = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw qrabi::ConfigError("config key " + key +
                                     ": cannot parse integer: " + v);
        }
    }

    const CLI::App* cmd_;
    std::map<std::string, std::string> kv_;
    std::set<std::string> seen_;
};

}  // namespace

int main(int argc, char** argv) {
    const std::string cmdline = join_argv(argc, argv);

    CLI::App app{
        "Numerical and analytical toolkit for the two-mode three-level "
        "quantum Rabi model"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qrabi::kVersion));
    const char* config_help = "read unset options from a flat key=value file";

    // phase-diagram -------------------------------------------------------
    std::string pd_gamma, pd_R, pd_out = ".", pd_config;
    auto* pd = app.add_subcommand(
        "phase-diagram",
        "Classify the mean-field ground state over a (gamma, R) grid");
    pd->add_option("--gamma", pd_gamma, "gamma values (scalar, a:b:c, or comma list)");
    pd->add_option("--R", pd_R, "R values (scalar, a:b:c, or comma list)");
    pd->add_option("--out", pd_out, "output directory")->capture_default_str();
    pd->add_option("--config", pd_config, config_help);
    pd->callback([&] {
        ConfigMerge merge(pd, pd_config);
        merge.apply("gamma", pd_gamma);
        merge.apply("R", pd_R);
        merge.apply("out", pd_out);
        merge.require_present("gamma");
        merge.require_present("R");
        merge.finish();
        qrabi::PhaseDiagramOptions opt;
        opt.gamma_range = qrabi::parse_value_list(pd_gamma);
        opt.R_range = qrabi::parse_value_list(pd_R);
        opt.out_dir = pd_out;
        opt.command_line = cmdline;
        opt.config_file = pd_config;
        qrabi::cmd_phase_diagram(opt);
    });

    // mean-photon ---------------------------------------------------------
    std::string mp_alpha, mp_R, mp_mode = "both", mp_out = ".", mp_config;
    double mp_beta = 1.0;
    auto* mp = app.add_subcommand(
        "mean-photon", "Mean photon numbers per eta from the closed forms");
    mp->add_option("--alpha", mp_alpha, "alpha values (scalar, a:b:c, or comma list)");
    mp->add_option("--beta", mp_beta, "coupling ratio g2/g1")->capture_default_str();
    mp->add_option("--R", mp_R, "R values (scalar, a:b:c, or comma list)");
    mp->add_option("--mode", mp_mode, "columns to emit")
        ->check(CLI::IsMember({"both", "n1", "n2"}))
        ->capture_default_str();
    mp->add_option("--out", mp_out, "output directory")->capture_default_str();
    mp->add_option("--config", mp_config, config_help);
    mp->callback([&] {
        ConfigMerge merge(mp, mp_config);
        merge.apply("alpha", mp_alpha);
        merge.apply("beta", mp_beta);
        merge.apply("R", mp_R);
        merge.apply("mode", mp_mode);
        merge.apply("out", mp_out);
        merge.require_present("alpha");
        merge.require_present("R");
        merge.finish();
        qrabi::MeanPhotonOptions opt;
        opt.alpha_range = qrabi::parse_value_list(mp_alpha);
        opt.beta = mp_beta;
        opt.R_range = qrabi::parse_value_list(mp_R);
        opt.mode = mp_mode;
        opt.out_dir = mp_out;
        opt.command_line = cmdline;
        opt.config_file = mp_config;
        qrabi::cmd_mean_photon(opt);
    });

    // solve ---------------------------------------------------------------
    qrabi::SolveOptions so;
    so.params.alpha = 0.8;
    so.params.beta = 1.2;
    std::string sv_config;
    auto* sv = app.add_subcommand(
        "solve", "Converged sparse ground state at one parameter point");
    sv->add_option("--alpha", so.params.alpha, "omega2/omega1");
    sv->add_option("--beta", so.params.beta, "g2/g1");
    sv->add_option("--delta", so.params.delta, "(eps2-eps1)/Delta")
        ->capture_default_str();
    sv->add_option("--R", so.params.R, "dimensionless coupling");
    sv->add_option("--eta", so.params.eta, "Delta/omega1");
    sv->add_option("--tol-energy", so.solver.tol_energy, "energy tolerance")
        ->capture_default_str();
    sv->add_option("--trunc-tol", so.solver.trunc_tol,
                   "relative observable tolerance across truncation growth")
        ->capture_default_str();
    sv->add_option("--seed", so.solver.seed, "start-vector seed")
        ->capture_default_str();
    sv->add_flag("--dump-vector", so.dump_vector,
                 "also write the ground-state vector as CSV");
    sv->add_option("--out", so.out_dir, "output directory")->capture_default_str();
    sv->add_option("--config", sv_config, config_help);
    sv->callback([&] {
        ConfigMerge merge(sv, sv_config);
        merge.apply("alpha", so.params.alpha);
        merge.apply("beta", so.params.beta);
        merge.apply("delta", so.params.delta);
        merge.apply("R", so.params.R);
        merge.apply("eta", so.params.eta);
        merge.apply("tol-energy", so.solver.tol_energy);
        merge.apply("trunc-tol", so.solver.trunc_tol);
        merge.apply("seed", so.solver.seed);
        merge.apply("dump-vector", so.dump_vector);
        merge.apply("out", so.out_dir);
        merge.require_present("alpha");
        merge.require_present("beta");
        merge.require_present("R");
        merge.require_present("eta");
        merge.finish();
        so.command_line = cmdline;
        so.config_file = sv_config;
        qrabi::cmd_solve(so);
    });

    // scaling -------------------------------------------------------------
    qrabi::ScalingOptions sc;
    std::string sc_eta, sc_R, sc_config;
    auto* sg = app.add_subcommand(
        "scaling",
        "Finite-eta sweep near a critical point plus exponent extraction");
    sg->add_option("--alpha", sc.alpha, "omega2/omega1")->capture_default_str();
    sg->add_option("--beta", sc.beta, "g2/g1")->capture_default_str();
    sg->add_option("--eta", sc_eta, "eta values (comma list of scalars/ranges)");
    sg->add_option("--R", sc_R, "R values (scalar, a:b:c, or comma list)");
    sg->add_option("--workers", sc.workers, "parallel eta rows")
        ->capture_default_str();
    sg->add_option("--seed", sc.solver.seed, "start-vector seed")
        ->capture_default_str();
    sg->add_option("--tol-energy", sc.solver.tol_energy, "energy tolerance")
        ->capture_default_str();
    sg->add_flag("--synthetic", sc.synthetic,
                 "use the built-in synthetic dataset instead of solving");
    sg->add_option("--spectator-states", sc.spectator_states,
                   "spectator-mode state count (<=0: built-in schedule)")
        ->capture_default_str();
    sg->add_option("--soft-states", sc.soft_states,
                   "soft-mode state count (<=0: built-in schedule)")
        ->capture_default_str();
    sg->add_option("--out", sc.out_dir, "output directory")->capture_default_str();
    sg->add_option("--config", sc_config, config_help);
    sg->callback([&] {
        ConfigMerge merge(sg, sc_config);
        merge.apply("alpha", sc.alpha);
        merge.apply("beta", sc.beta);
        merge.apply("eta", sc_eta);
        merge.apply("R", sc_R);
        merge.apply("workers", sc.workers);
        merge.apply("seed", sc.solver.seed);
        merge.apply("tol-energy", sc.solver.tol_energy);
        merge.apply("synthetic", sc.synthetic);
        merge.apply("spectator-states", sc.spectator_states);
        merge.apply("soft-states", sc.soft_states);
        merge.apply("out", sc.out_dir);
        merge.require_present("eta");
        merge.require_present("R");
        merge.finish();
        sc.eta_list = qrabi::parse_value_list(sc_eta);
        sc.R_range = qrabi::parse_value_list(sc_R);
        sc.command_line = cmdline;
        sc.config_file = sc_config;
        qrabi::cmd_scaling(sc);
    });

    // universal-f ---------------------------------------------------------
    qrabi::UniversalFOptions uf;
    std::string uf_branch = "mode2", uf_rp, uf_config;
    auto* un = app.add_subcommand(
        "universal-f", "Universal scaling function from the 1-D quartic model");
    un->add_option("--branch", uf_branch, "which mode goes soft")
        ->check(CLI::IsMember({"mode1", "mode2"}));
    un->add_option("--alpha", uf.alpha, "omega2/omega1")->capture_default_str();
    un->add_option("--beta", uf.beta, "g2/g1")->capture_default_str();
    un->add_option("--rprime", uf_rp, "r' values (scalar, a:b:c, or comma list)");
    un->add_option("--trunc-1d", uf.trunc_1d, "oscillator basis size")
        ->capture_default_str();
    un->add_option("--out", uf.out_dir, "output directory")->capture_default_str();
    un->add_option("--config", uf_config, config_help);
    un->callback([&] {
        ConfigMerge merge(un, uf_config);
        merge.apply("branch", uf_branch);
        merge.apply("alpha", uf.alpha);
        merge.apply("beta", uf.beta);
        merge.apply("rprime", uf_rp);
        merge.apply("trunc-1d", uf.trunc_1d);
        merge.apply("out", uf.out_dir);
        merge.require_present("branch");
        merge.require_present("rprime");
        merge.finish();
        if (uf_branch != "mode1" && uf_branch != "mode2")
            throw qrabi::ConfigError("branch must be mode1 or mode2, got " +
                                     uf_branch);
        uf.branch = uf_branch == "mode2" ? qrabi::Branch::Mode2 : qrabi::Branch::Mode1;
        uf.rprime_range = qrabi::parse_value_list(uf_rp);
        uf.command_line = cmdline;
        uf.config_file = uf_config;
        qrabi::cmd_universal_f(uf);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const qrabi::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qrabi::NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
