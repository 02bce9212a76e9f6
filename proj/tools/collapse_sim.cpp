// collapse_sim: simulation and analysis front-end for the filtration-absorption
// equation  dh/dt = h h_xx - (c-1) h_x^2.
//
// Subcommands
//   simulate    run a moving-boundary finite-difference experiment from a JSON
//               config (or a manifest of a previous run); writes series and
//               snapshot CSVs plus manifest.json
//   fit         extract (t0, B, mu) from a series CSV; emits a JSON report and
//               plot-ready CSVs for the linear and log-log lines
//   selfsimilar sample the closed-form solutions to CSV
//   shoot       recover the similarity exponent numerically for a given c
//   reduce      reduce physical rock/fluid parameters to the coefficient c
//
// Exit codes: 0 success, 1 configuration/domain error, 2 numerical failure.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "collapse/config.hpp"
#include "collapse/diagnostics.hpp"
#include "collapse/eigenproblem.hpp"
#include "collapse/io.hpp"
#include "collapse/pde_solver.hpp"
#include "collapse/physmap.hpp"
#include "collapse/selfsimilar.hpp"
#include "collapse/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct RunOutcome {
    std::string run_id;
    bool ok = false;
    std::string message;
};

RunOutcome execute_run(collapse::RunConfig cfg) {
    RunOutcome out;
    out.run_id = cfg.run_id;
    const fs::path dir = collapse::resolve_output_dir(cfg);
    fs::create_directories(dir);
    collapse::io::write_text_file(dir / "manifest.json", collapse::make_manifest(cfg).dump(2) + "\n");
    try {
        const collapse::TimeSeries series =
            collapse::run(collapse::build_ic(cfg), cfg.coefficient(), cfg.scheme, cfg.run_id);
        collapse::io::write_run_outputs(dir, series);
        const auto& last = series.records.back();
        out.ok = true;
        out.message = cfg.run_id + ": " + series.meta.termination +
                      " at t = " + collapse::io::format_double(last.t) +
                      ", x_f = " + collapse::io::format_double(last.half_width()) +
                      ", h_max = " + collapse::io::format_double(last.h_max) + " -> " +
                      dir.string();
    } catch (const collapse::RunAborted& e) {
        collapse::io::write_run_outputs(dir, e.series);  // partial data aids post-mortems
        out.message = cfg.run_id + ": numerical abort: " + e.what();
    }
    return out;
}

int cmd_simulate(const std::string& config_path, const std::string& sweep) {
    collapse::RunConfig base;
    try {
        base = collapse::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::vector<collapse::RunConfig> runs;
    if (sweep.empty()) {
        runs.push_back(base);
    } else {
        if (base.rock_fluid) {
            std::cerr << "config error: --sweep overrides c and requires a c-based config\n";
            return kExitConfig;
        }
        std::string item;
        std::istringstream ss(sweep);
        while (std::getline(ss, item, ',')) {
            try {
                const double cv = std::stod(item);
                collapse::RunConfig r = base;
                r.c = cv;
                r.run_id = base.run_id + "_c" + item;
                runs.push_back(r);
            } catch (const std::exception&) {
                std::cerr << "config error: bad sweep value '" << item << "'\n";
                return kExitConfig;
            }
        }
        if (runs.empty()) {
            std::cerr << "config error: empty sweep list\n";
            return kExitConfig;
        }
    }

    std::vector<std::future<RunOutcome>> futures;
    futures.reserve(runs.size());
    for (auto& r : runs)
        futures.push_back(std::async(runs.size() > 1 ? std::launch::async : std::launch::deferred,
                                     execute_run, r));
    bool all_ok = true;
    for (auto& f : futures) {
        const RunOutcome o = f.get();
        (o.ok ? std::cout : std::cerr) << o.message << "\n";
        all_ok = all_ok && o.ok;
    }
    return all_ok ? kExitOk : kExitNumerical;
}

int cmd_fit(const std::string& series_path, double c, std::optional<double> win_begin,
            std::optional<double> win_end, const std::string& out_dir_flag) {
    collapse::TimeSeries series;
    try {
        series = collapse::io::read_series_csv(series_path);
        series.meta.c = c;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfig;
    }
    if (win_begin.has_value() != win_end.has_value()) {
        std::cerr << "input error: --window-start and --window-end must be given together\n";
        return kExitConfig;
    }
    try {
        collapse::FitWindow window;
        if (win_begin && win_end) {
            window = {*win_begin, *win_end};
        } else {
            window = collapse::select_fit_window(series);
        }
        const collapse::T0Fit t0fit = collapse::fit_t0(series, c, window);
        const collapse::MuBFit mb = collapse::fit_mu_B(series, t0fit.t0, window);

        json report;
        report["t0"] = t0fit.t0;
        report["B"] = mb.B;
        report["mu"] = mb.mu;
        report["r2_linear"] = t0fit.r2_linear;
        report["r2_loglog"] = mb.r2_loglog;
        report["window_start"] = window.t_begin;
        report["window_end"] = window.t_end;
        std::cout << report.dump(2) << "\n";

        const fs::path src(series_path);
        const fs::path dir = out_dir_flag.empty() ? src.parent_path() : fs::path(out_dir_flag);
        fs::create_directories(dir.empty() ? fs::path(".") : dir);
        const std::string stem = src.stem().string();
        std::vector<double> t, y, lt, lx;
        for (const auto& r : series.records) {
            t.push_back(r.t);
            y.push_back(r.half_width() * r.half_width() / r.h_max);
            if (r.t < t0fit.t0) {
                lt.push_back(std::log(t0fit.t0 - r.t));
                lx.push_back(std::log(r.half_width()));
            }
        }
        collapse::io::write_text_file(dir / (stem + "_line_t0.csv"),
                                      collapse::io::columns_csv("t,xf_sq_over_hmax", t, y));
        collapse::io::write_text_file(dir / (stem + "_loglog.csv"),
                                      collapse::io::columns_csv("ln_t0_minus_t,ln_xf", lt, lx));
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_selfsimilar(double c, double B, double t0, double t, double x0, double theta, double cexp,
                    bool use_exponential, const std::string& output, bool series, double t_begin,
                    double t_end, int samples) {
    try {
        if (use_exponential) {
            const collapse::ExponentialLimitSolution sol(cexp, theta, x0);
            if (series) {
                std::vector<double> ts, xf, hm;
                collapse::TimeSeries s;
                s.meta.run_id = "exponential";
                for (int i = 0; i < samples; ++i) {
                    const double tv = t_begin + (t_end - t_begin) * i / double(samples - 1);
                    const double w = sol.half_width(tv);
                    s.records.push_back({tv, x0 - w, x0 + w, sol.h_max(tv)});
                }
                collapse::io::write_series_csv(output, s);
            } else {
                std::vector<double> xs, hs;
                const double w = sol.half_width(t);
                for (int i = 0; i < samples; ++i) {
                    const double x = x0 - w + 2.0 * w * i / double(samples - 1);
                    xs.push_back(x);
                    hs.push_back(sol.evaluate(x, t));
                }
                collapse::io::write_text_file(output, collapse::io::columns_csv("x,h", xs, hs));
            }
        } else {
            const collapse::SelfSimilarSolution sol(c, B, t0, x0);
            if (series) {
                collapse::io::write_series_csv(
                    output, collapse::series_from_solution(sol, t_begin, t_end,
                                                           static_cast<std::size_t>(samples)));
            } else {
                std::vector<double> xs, hs;
                const double w = sol.half_width(t);
                for (int i = 0; i < samples; ++i) {
                    const double x = x0 - w + 2.0 * w * i / double(samples - 1);
                    xs.push_back(x);
                    hs.push_back(sol.evaluate(x, t));
                }
                collapse::io::write_text_file(output, collapse::io::columns_csv("x,h", xs, hs));
            }
        }
        std::cout << "wrote " << output << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_shoot(double c, const std::string& profile_path, double delta, double step) {
    collapse::ShootingConfig cfg;
    cfg.start_offset = delta;
    cfg.ode_step = step;
    try {
        cfg.c = c;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const collapse::EigenSolution sol = collapse::solve_eigenvalue(c, cfg);
        const double analytic = collapse::mu_of_c(c);
        std::cout << "mu_numeric      = " << collapse::io::format_double(sol.mu_numeric) << "\n"
                  << "|mu - analytic| = "
                  << collapse::io::format_double(std::abs(sol.mu_numeric - analytic)) << "\n"
                  << "residual F'(0)  = " << collapse::io::format_double(sol.residual_at_zero)
                  << " (profile), " << collapse::io::format_double(sol.shooting_residual)
                  << " (shot)\n"
                  << "iterations      = " << sol.iterations << "\n";
        if (sol.candidate_mus.size() > 1) {
            std::cout << "candidates      =";
            for (double m : sol.candidate_mus)
                std::cout << " " << collapse::io::format_double(m);
            std::cout << "\n";
        }
        if (!profile_path.empty()) {
            collapse::io::write_text_file(
                profile_path, collapse::io::columns_csv("xi,F", sol.xi, sol.profile));
            std::cout << "wrote " << profile_path << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_reduce(const std::string& params_path) {
    try {
        std::ifstream in(params_path);
        if (!in) throw std::runtime_error("cannot open " + params_path);
        json j;
        in >> j;
        const collapse::RockFluidParams p = collapse::detail::parse_rock_fluid(j);
        const collapse::CanonicalReduction r = collapse::reduce(p);
        json out;
        out["c"] = r.c;
        out["kappa"] = r.kappa;
        out["space_scale"] = r.space_scale;
        out["regime"] = collapse::regime_name(collapse::classify(r.c).regime);
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"filtration-absorption equation: simulation and analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(collapse::kArtifactName) + " " +
                                          collapse::kArtifactVersion);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run an experiment from a JSON config");
    std::string config_path, sweep;
    sim->add_option("--config", config_path, "config or manifest JSON")->required();
    sim->add_option("--sweep", sweep, "comma-separated c values; runs one job per value");

    // fit
    auto* fit = app.add_subcommand("fit", "extract (t0, B, mu) from a series CSV");
    std::string series_path, fit_out_dir;
    double fit_c = 1.75;
    std::optional<double> win_begin, win_end;
    fit->add_option("--series", series_path, "series CSV (t,x_L,x_R,h_max)")->required();
    fit->add_option("--c", fit_c, "absorption coefficient of the run")->required();
    fit->add_option("--window-start", win_begin, "fit window start (default: auto-select)");
    fit->add_option("--window-end", win_end, "fit window end");
    fit->add_option("--out-dir", fit_out_dir, "directory for plot CSVs (default: beside input)");

    // selfsimilar
    auto* ss = app.add_subcommand("selfsimilar", "sample closed-form solutions to CSV");
    double ss_c = 1.75, ss_B = 1.0, ss_t0 = 1.0, ss_t = 0.0, ss_x0 = 0.0;
    double ss_theta = 0.0, ss_C = 0.0, ss_tb = 0.0, ss_te = 0.0;
    int ss_n = 401;
    bool ss_series = false;
    std::string ss_out = "selfsimilar.csv";
    ss->add_option("--c", ss_c, "absorption coefficient");
    ss->add_option("--B", ss_B, "similarity constant");
    ss->add_option("--t0", ss_t0, "collapse time / additive constant");
    ss->add_option("--t", ss_t, "evaluation time for the profile");
    ss->add_option("--x0", ss_x0, "dome center");
    ss->add_option("--theta", ss_theta, "e-folding time of the c=3/2 solution");
    ss->add_option("--C", ss_C, "amplitude constant of the c=3/2 solution");
    ss->add_flag("--series", ss_series, "emit a (t,x_L,x_R,h_max) series instead of a profile");
    ss->add_option("--t-start", ss_tb, "series start time");
    ss->add_option("--t-end", ss_te, "series end time");
    ss->add_option("--samples", ss_n, "sample count");
    ss->add_option("--output", ss_out, "output CSV path");

    // shoot
    auto* sh = app.add_subcommand("shoot", "recover the similarity exponent numerically");
    double sh_c = 1.75, sh_delta = 1e-3, sh_step = 1e-3;
    std::string sh_profile;
    sh->add_option("--c", sh_c, "absorption coefficient (> 3/2)")->required();
    sh->add_option("--profile", sh_profile, "write the recovered profile (xi,F) CSV here");
    sh->add_option("--start-offset", sh_delta, "distance of the start point from xi = 1");
    sh->add_option("--ode-step", sh_step, "RK4 step size");

    // reduce
    auto* rd = app.add_subcommand("reduce", "reduce physical parameters to c");
    std::string params_path;
    rd->add_option("--params", params_path, "rock/fluid parameter JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, sweep);
        if (fit->parsed()) return cmd_fit(series_path, fit_c, win_begin, win_end, fit_out_dir);
        if (ss->parsed()) {
            const bool exponential = ss->count("--theta") > 0 || ss->count("--C") > 0;
            if (exponential && (!(ss_theta > 0.0) || !(ss_C > 0.0))) {
                std::cerr << "error: the exponential solution needs --theta > 0 and --C > 0\n";
                return kExitConfig;
            }
            return cmd_selfsimilar(ss_c, ss_B, ss_t0, ss_t, ss_x0, ss_theta, ss_C, exponential,
                                   ss_out, ss_series, ss_tb, ss_te, ss_n);
        }
        if (sh->parsed()) return cmd_shoot(sh_c, sh_profile, sh_delta, sh_step);
        if (rd->parsed()) return cmd_reduce(params_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
