#include "qrabi/cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "qrabi/analytic.hpp"
#include "qrabi/io.hpp"

namespace fs = std::filesystem;

namespace qrabi {

namespace {

double parse_value(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw ConfigError("trailing characters in number: " + s);
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number: " + s);
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
    const std::vector<std::string> parts = split(text, ':');
    if (parts.size() == 1) return {parse_value(parts[0])};
    if (parts.size() != 3)
        throw ConfigError("range must be a scalar or start:stop:step, got: " + text);
    const double start = parse_value(parts[0]);
    const double stop = parse_value(parts[1]);
    const double step = parse_value(parts[2]);
    if (!(step > 0.0)) throw ConfigError("range step must be > 0: " + text);
    const double span = (stop - start) / step;
    if (span < -0.5) throw ConfigError("empty range: " + text);
    const long n = std::lround(std::floor(span + 0.5));
    std::vector<double> out;
    out.reserve(n + 1);
    for (long i = 0; i <= n; ++i) out.push_back(start + i * step);
    return out;
}

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& part : split(text, ',')) {
        const std::vector<double> r = parse_range(part);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

namespace {

std::string join_values(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

fs::path prepare_out_dir(const std::string& out_dir) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir);
    return dir;
}

void stamp(RunManifest& mf, const std::string& command_line,
           const std::string& config_file) {
    mf.command_line = command_line;
    if (!config_file.empty()) mf.hash_input(config_file);
}

}  // namespace

void cmd_phase_diagram(const PhaseDiagramOptions& opt) {
    if (opt.gamma_range.empty() || opt.R_range.empty())
        throw ConfigError("phase-diagram requires non-empty gamma and R ranges");
    const fs::path dir = prepare_out_dir(opt.out_dir);

    RunManifest mf;
    mf.command = "phase-diagram";
    stamp(mf, opt.command_line, opt.config_file);
    mf.add_option("gamma", join_values(opt.gamma_range));
    mf.add_option("R", join_values(opt.R_range));
    mf.add_option("out", opt.out_dir);

    CsvWriter csv((dir / "phase_diagram.csv").string());
    csv.row({"gamma", "R", "label", "y1", "y2", "energy"});
    for (double g : opt.gamma_range) {
        if (!(g > 0.0)) throw ConfigError("gamma values must be > 0");
        for (double R : opt.R_range) {
            ModelParams p;
            p.alpha = g;  // beta = 1 convention: gamma == alpha
            p.beta = 1.0;
            p.R = R;
            const PhaseClassification ph = classify_phase(p);
            csv.row({format_double(g), format_double(R), to_string(ph.label),
                     format_double(ph.y1), format_double(ph.y2),
                     format_double(ph.energy)});
        }
    }
    csv.close();
    mf.write((dir / "manifest.json").string());
}

void cmd_mean_photon(const MeanPhotonOptions& opt) {
    if (opt.alpha_range.empty() || opt.R_range.empty())
        throw ConfigError("mean-photon requires non-empty alpha and R ranges");
    if (!(opt.beta > 0.0)) throw ConfigError("beta must be > 0");
    if (opt.mode != "both" && opt.mode != "n1" && opt.mode != "n2")
        throw ConfigError("mode must be one of: both, n1, n2");
    const fs::path dir = prepare_out_dir(opt.out_dir);

    RunManifest mf;
    mf.command = "mean-photon";
    stamp(mf, opt.command_line, opt.config_file);
    mf.add_option("alpha", join_values(opt.alpha_range));
    mf.add_option("beta", format_double(opt.beta));
    mf.add_option("R", join_values(opt.R_range));
    mf.add_option("mode", opt.mode);
    mf.add_option("out", opt.out_dir);

    const bool want1 = opt.mode != "n2";
    const bool want2 = opt.mode != "n1";
    CsvWriter csv((dir / "mean_photon.csv").string());
    std::vector<std::string> header{"gamma", "R"};
    if (want1) header.push_back("n1_over_eta");
    if (want2) header.push_back("n2_over_eta");
    header.push_back("flag");
    csv.row(header);

    const double b2 = opt.beta * opt.beta;
    for (double a : opt.alpha_range) {
        if (!(a > 0.0)) throw ConfigError("alpha values must be > 0");
        const double gamma = a / b2;
        for (double R : opt.R_range) {
            std::vector<std::string> row{format_double(gamma), format_double(R)};
            if (a == b2) {
                if (want1) row.push_back("");
                if (want2) row.push_back("");
                row.push_back("u1-boundary");
            } else {
                ModelParams p;
                p.alpha = a;
                p.beta = opt.beta;
                p.R = R;
                const MeanPhotons mp = mean_photon_analytic(p);
                if (want1) row.push_back(format_double(mp.n1_over_eta));
                if (want2) row.push_back(format_double(mp.n2_over_eta));
                row.push_back("");
            }
            csv.row(row);
        }
    }
    csv.close();
    mf.write((dir / "manifest.json").string());
}

GroundStateResult cmd_solve(const SolveOptions& opt) {
    opt.params.validate();
    const fs::path dir = prepare_out_dir(opt.out_dir);

    RunManifest mf;
    mf.command = "solve";
    stamp(mf, opt.command_line, opt.config_file);
    mf.seed = opt.solver.seed;
    mf.add_option("alpha", format_double(opt.params.alpha));
    mf.add_option("beta", format_double(opt.params.beta));
    mf.add_option("delta", format_double(opt.params.delta));
    mf.add_option("R", format_double(opt.params.R));
    mf.add_option("eta", format_double(opt.params.eta));
    mf.add_option("tol_energy", format_double(opt.solver.tol_energy));
    mf.add_option("trunc_tol", format_double(opt.solver.trunc_tol));
    mf.add_option("seed", std::to_string(opt.solver.seed));
    mf.add_option("dump_vector", opt.dump_vector ? "true" : "false");
    mf.add_option("out", opt.out_dir);

    const GroundStateResult r = solve_ground_state(opt.params, opt.solver);
    if (!r.converged)
        throw NonConvergence("ground state did not converge: residual=" +
                             format_double(r.residual) + " at n1_max=" +
                             std::to_string(r.trunc_used.n1_max) + ", n2_max=" +
                             std::to_string(r.trunc_used.n2_max));

    JsonObject o;
    o.put_number("alpha", opt.params.alpha);
    o.put_number("beta", opt.params.beta);
    o.put_number("delta", opt.params.delta);
    o.put_number("R", opt.params.R);
    o.put_number("eta", opt.params.eta);
    o.put_number("energy", r.energy);
    o.put_number("n1", r.n1);
    o.put_number("n2", r.n2);
    o.put_number("parity", r.parity);
    o.put_number("residual", r.residual);
    o.put_number("tail1", r.tail1);
    o.put_number("tail2", r.tail2);
    o.put_int("n1_max", r.trunc_used.n1_max);
    o.put_int("n2_max", r.trunc_used.n2_max);
    o.put_int("iterations", r.iterations);
    o.put_bool("converged", r.converged);
    {
        std::ofstream out(dir / "ground_state.json", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write ground_state.json");
        out << o.str() << "\n";
    }
    if (opt.dump_vector) {
        CsvWriter csv((dir / "vector.csv").string());
        csv.row({"index", "value"});
        for (std::size_t i = 0; i < r.vector.size(); ++i)
            csv.row({std::to_string(i), format_double(r.vector[i])});
        csv.close();
    }
    mf.write((dir / "manifest.json").string());
    return r;
}

namespace {

int soft_states_schedule(double eta) {
    return static_cast<int>(std::floor(
        40.0 + 11.2 * std::exp(-8.0 * std::pow(eta, -1.0 / 3.0)) *
                   std::pow(eta, 1.0 / 3.0)));
}

struct PointFailure {
    double eta, R;
    std::string detail;
};

}  // namespace

SweepDataset run_sweep(const ScalingOptions& opt) {
    const double b2 = opt.beta * opt.beta;
    if (opt.alpha == b2)
        throw ConfigError("scaling at the U(1) boundary alpha = beta^2 is unsupported");
    const Branch regime = (opt.alpha < b2) ? Branch::Mode2 : Branch::Mode1;

    std::vector<double> etas = opt.eta_list;
    std::sort(etas.begin(), etas.end());
    if (std::adjacent_find(etas.begin(), etas.end()) != etas.end())
        throw ConfigError("eta list contains duplicates");
    std::vector<double> Rs = opt.R_range;
    std::sort(Rs.begin(), Rs.end());

    SweepDataset data;
    data.regime = regime;
    data.alpha = opt.alpha;
    data.beta = opt.beta;
    data.delta = 0.0;
    data.etas = etas;
    data.Rs = Rs;
    data.n_over_eta.assign(etas.size() * Rs.size(), 0.0);

    const int spectator =
        opt.spectator_states > 0 ? opt.spectator_states
                                 : (regime == Branch::Mode2 ? 12 : 14);

    const std::size_t ne = etas.size();
    std::vector<std::vector<PointFailure>> row_failures(ne);
    std::vector<std::exception_ptr> row_errors(ne);

#pragma omp parallel for num_threads(opt.workers) schedule(dynamic)
    for (std::ptrdiff_t je = 0; je < static_cast<std::ptrdiff_t>(ne); ++je) {
        try {
            const double eta = etas[je];
            SolverConfig cfg = opt.solver;
            cfg.seed = split_seed(opt.solver.seed, static_cast<std::uint64_t>(je));
            cfg.parity = ParityMode::Even;

            const int soft0 =
                opt.soft_states > 0 ? opt.soft_states : soft_states_schedule(eta);
            TruncationSpec t;
            if (regime == Branch::Mode2) {
                t.n1_max = spectator - 1;
                t.n2_max = soft0 - 1;
            } else {
                t.n1_max = soft0 - 1;
                t.n2_max = spectator - 1;
            }

            std::vector<double> warm;
            for (std::size_t ir = 0; ir < Rs.size(); ++ir) {
                ModelParams p;
                p.alpha = opt.alpha;
                p.beta = opt.beta;
                p.R = Rs[ir];
                p.eta = eta;
                GroundStateResult r;
                for (int attempt = 0;; ++attempt) {
                    r = solve_at_truncation(p, t, cfg, warm.empty() ? nullptr : &warm);
                    const bool tails_ok = r.tail1 <= cfg.tail_mass_max &&
                                          r.tail2 <= cfg.tail_mass_max;
                    if ((tails_ok && r.converged) || attempt >= 6) {
                        if (!(tails_ok && r.converged)) {
                            PointFailure f;
                            f.eta = eta;
                            f.R = Rs[ir];
                            f.detail = "residual=" + format_double(r.residual) +
                                       " tails=(" + format_double(r.tail1) + "," +
                                       format_double(r.tail2) + ") n1_max=" +
                                       std::to_string(t.n1_max) + " n2_max=" +
                                       std::to_string(t.n2_max) +
                                       (r.converged ? "" : " lanczos-unconverged");
                            row_failures[je].push_back(std::move(f));
                        }
                        break;
                    }
                    TruncationSpec grown = t;
                    if (r.tail1 > cfg.tail_mass_max)
                        grown.n1_max =
                            std::max(static_cast<int>(std::ceil((t.n1_max + 1) * 1.3)) - 1,
                                     t.n1_max + 2);
                    if (r.tail2 > cfg.tail_mass_max)
                        grown.n2_max =
                            std::max(static_cast<int>(std::ceil((t.n2_max + 1) * 1.3)) - 1,
                                     t.n2_max + 2);
                    if (!r.converged && grown.n1_max == t.n1_max &&
                        grown.n2_max == t.n2_max) {
                        // Lanczos stalled with clean tails: retry from scratch
                        // at the same truncation with a reseeded start.
                        cfg.seed = split_seed(cfg.seed, 0xa17);
                        warm.clear();
                    } else {
                        warm = pad_vector(r.vector, t, grown);
                        t = grown;
                    }
                }
                data.n_over_eta[ir * ne + je] =
                    (regime == Branch::Mode2 ? r.n2 : r.n1) / eta;
                warm = std::move(r.vector);
            }
        } catch (...) {
            row_errors[je] = std::current_exception();
        }
    }

    for (std::size_t je = 0; je < ne; ++je)
        if (row_errors[je]) std::rethrow_exception(row_errors[je]);

    std::size_t nfail = 0;
    for (const auto& rf : row_failures) nfail += rf.size();
    if (nfail > 0) {
        std::ostringstream msg;
        msg << nfail << " sweep point(s) failed to converge:\n";
        for (const auto& rf : row_failures)
            for (const auto& f : rf)
                msg << "  eta=" << format_double(f.eta) << " R=" << format_double(f.R)
                    << " " << f.detail << "\n";
        std::cerr << msg.str();
        throw NonConvergence(msg.str());
    }
    return data;
}

ScalingOutput cmd_scaling(const ScalingOptions& opt) {
    if (opt.eta_list.size() < 4)
        throw ConfigError("scaling requires at least 4 eta values");
    if (opt.R_range.size() < 3)
        throw ConfigError("scaling requires at least 3 R values");
    if (opt.workers < 1) throw ConfigError("workers must be >= 1");
    const fs::path dir = prepare_out_dir(opt.out_dir);

    RunManifest mf;
    mf.command = "scaling";
    stamp(mf, opt.command_line, opt.config_file);
    mf.seed = opt.solver.seed;
    mf.add_option("alpha", format_double(opt.alpha));
    mf.add_option("beta", format_double(opt.beta));
    mf.add_option("eta", join_values(opt.eta_list));
    mf.add_option("R", join_values(opt.R_range));
    mf.add_option("workers", std::to_string(opt.workers));
    mf.add_option("seed", std::to_string(opt.solver.seed));
    mf.add_option("tol_energy", format_double(opt.solver.tol_energy));
    mf.add_option("synthetic", opt.synthetic ? "true" : "false");
    mf.add_option("spectator_states", std::to_string(opt.spectator_states));
    mf.add_option("soft_states", std::to_string(opt.soft_states));
    mf.add_option("out", opt.out_dir);

    ScalingOutput out;
    if (opt.synthetic) {
        std::vector<double> etas = opt.eta_list;
        std::sort(etas.begin(), etas.end());
        std::vector<double> Rs = opt.R_range;
        std::sort(Rs.begin(), Rs.end());
        const CriticalPoint cp = critical_coupling(opt.alpha, opt.beta);
        out.data = synthetic_dataset(opt.alpha, opt.beta, etas, Rs, cp.Rc);
    } else {
        out.data = run_sweep(opt);
    }

    const LocateResult loc = locate_critical(out.data);
    const CollapseResult col = collapse_nu(out.data, loc.Rc_est, loc.slope);
    out.fit.Rc_est = loc.Rc_est;
    out.fit.slope = loc.slope;
    out.fit.nu = col.nu;
    out.fit.kappa = -loc.slope * col.nu;
    out.fit.linfit_residual = loc.linfit_residual;
    out.fit.collapse_cost = col.collapse_cost;
    out.fit.eta_min = loc.eta_min;

    const std::size_t ne = out.data.etas.size();
    const std::size_t nR = out.data.Rs.size();

    CsvWriter raw((dir / "sweep_raw.csv").string());
    raw.row({"eta", "R", "n_over_eta"});
    for (std::size_t ir = 0; ir < nR; ++ir)
        for (std::size_t je = 0; je < ne; ++je)
            raw.row({format_double(out.data.etas[je]), format_double(out.data.Rs[ir]),
                     format_double(out.data.at(ir, je))});
    raw.close();

    // Collapsed coordinates with the fitted exponents.
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    CsvWriter collapsed((dir / "collapsed.csv").string());
    collapsed.row({"eta", "R", "x", "y"});
    for (std::size_t ir = 0; ir < nR; ++ir) {
        const double r = (out.data.Rs[ir] - out.fit.Rc_est) / out.fit.Rc_est;
        for (std::size_t je = 0; je < ne; ++je) {
            const double eta = out.data.etas[je];
            const double x = std::pow(eta, 1.0 / out.fit.nu) * r;
            const double y = out.data.at(ir, je) * std::pow(eta, -out.fit.slope);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
            collapsed.row({format_double(eta), format_double(out.data.Rs[ir]),
                           format_double(x), format_double(y)});
        }
    }
    collapsed.close();

    JsonObject rep;
    rep.put("regime", out.data.regime == Branch::Mode2 ? "mode2" : "mode1");
    rep.put_number("alpha", opt.alpha);
    rep.put_number("beta", opt.beta);
    rep.put_bool("synthetic", opt.synthetic);
    rep.put_number("Rc_est", out.fit.Rc_est);
    rep.put_number("slope", out.fit.slope);
    rep.put_number("nu", out.fit.nu);
    rep.put_number("kappa", out.fit.kappa);
    rep.put_number("linfit_residual", out.fit.linfit_residual);
    rep.put_number("collapse_cost", out.fit.collapse_cost);
    rep.put_number("eta_min", out.fit.eta_min);
    rep.put_number("collapsed_y_range", ymax - ymin);
    rep.put_int("n_eta", static_cast<long long>(ne));
    rep.put_int("n_R", static_cast<long long>(nR));
    rep.put_raw("R_slices", json_number_array(out.data.Rs));
    rep.put_raw("slice_slopes", json_number_array(loc.slice_slopes));
    rep.put_raw("slice_ssr", json_number_array(loc.slice_ssr));
    rep.put_raw("manifest", mf.to_json(false));
    {
        std::ofstream o(dir / "fit_report.json", std::ios::binary);
        if (!o) throw std::runtime_error("cannot write fit_report.json");
        o << rep.str() << "\n";
    }
    mf.write((dir / "manifest.json").string());
    return out;
}

void cmd_universal_f(const UniversalFOptions& opt) {
    if (opt.rprime_range.empty())
        throw ConfigError("universal-f requires a non-empty rprime range");
    if (opt.trunc_1d < 2) throw ConfigError("trunc_1d must be >= 2");
    const fs::path dir = prepare_out_dir(opt.out_dir);

    RunManifest mf;
    mf.command = "universal-f";
    stamp(mf, opt.command_line, opt.config_file);
    mf.add_option("branch", opt.branch == Branch::Mode2 ? "mode2" : "mode1");
    mf.add_option("alpha", format_double(opt.alpha));
    mf.add_option("beta", format_double(opt.beta));
    mf.add_option("rprime", join_values(opt.rprime_range));
    mf.add_option("trunc_1d", std::to_string(opt.trunc_1d));
    mf.add_option("out", opt.out_dir);

    ModelParams p;
    p.alpha = opt.alpha;
    p.beta = opt.beta;
    const auto curve = universal_f(opt.branch, p, opt.rprime_range, opt.trunc_1d);

    CsvWriter csv((dir / "universal_f.csv").string());
    csv.row({"rprime", "f"});
    for (const auto& [rp, f] : curve)
        csv.row({format_double(rp), format_double(f)});
    csv.close();
    mf.write((dir / "manifest.json").string());
}

}  // namespace qrabi
