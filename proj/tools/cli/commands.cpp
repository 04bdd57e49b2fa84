#include "commands.hpp"

#include "cmetric/evaluate.hpp"
#include "cmetric/kernel.hpp"
#include "cmetric/system.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cmetric::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream file(cfg.output_dir / name, std::ios::binary);
    if (!file) {
        throw ConfigError("cannot write '" + (cfg.output_dir / name).string() + "'");
    }
    return file;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& doc) {
    open_output(cfg, name) << doc.dump(2) << '\n';
}

std::string coordinate_header(int n) {
    if (n == 2) {
        return "x,y";
    }
    std::string out;
    for (int a = 0; a < n; ++a) {
        out += (a ? ",x" : "x") + std::to_string(a);
    }
    return out;
}

std::string coordinates(const Vector& x) {
    std::string out;
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        out += (a ? "," : "") + fmt(x[a]);
    }
    return out;
}

struct Solved {
    ProblemSetup setup;
    RadialKernel kernel;
    PointList points;
    std::optional<RecoverySolution> solution;
    double assemble_seconds = 0.0;
    double solve_seconds = 0.0;
};

ProblemSetup setup_from(const RunConfig& cfg) {
    const auto registry = SystemRegistry::with_builtins();
    if (!registry.contains(cfg.system)) {
        throw ConfigError("unknown system '" + cfg.system + "'");
    }
    ProblemSetup setup = registry.make(cfg.system);
    const int n = setup.system.dimension;
    if (cfg.rhs) {
        if (cfg.rhs->rows() != n) {
            throw ConfigError("rhs must be " + std::to_string(n) + " x " + std::to_string(n));
        }
        setup.rhs = *cfg.rhs;
    }
    for (const GridSpec* g : {&cfg.grid, &cfg.check_grid, &cfg.evaluation_grid()}) {
        if (g->lower.size() != n) {
            throw ConfigError("grid dimension does not match system dimension " + std::to_string(n));
        }
    }
    return setup;
}

Solved solve_from(const RunConfig& cfg) {
    Solved s{setup_from(cfg), wendland_c8(cfg.kernel_c), make_grid(cfg.grid), std::nullopt};
    auto start = Clock::now();
    auto assembly = assemble(s.setup.system, s.kernel, s.points, {cfg.threads, true});
    s.assemble_seconds = seconds_since(start);
    start = Clock::now();
    s.solution.emplace(solve(std::move(assembly), s.kernel, s.setup.rhs, {cfg.regularize}));
    s.solve_seconds = seconds_since(start);
    return s;
}

json diagnostics_json(const SolverDiagnostics& d) {
    return {{"relative_residual", d.relative_residual},
            {"regularized", d.regularized},
            {"regularization", d.regularization},
            {"status", d.status}};
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const Solved s = solve_from(cfg);
    const auto& sol = *s.solution;
    const auto start = Clock::now();
    const double separation = s.points.size() > 1 ? separation_distance(s.points) : 0.0;
    const double fill = fill_distance_estimate(s.points, cfg.grid.lower, cfg.grid.upper,
                                               cfg.fill_probe_spacing());
    const double geometry_seconds = seconds_since(start);

    json doc = {{"system", cfg.system},
                {"kernel", {{"name", "wendland_c8"}, {"c", cfg.kernel_c},
                            {"sigma", s.kernel.smoothness()}}},
                {"points", sol.set().size()},
                {"unknowns", sol.set().functional_count()},
                {"matrix_dimension", sol.set().functional_count()},
                {"separation_distance", separation},
                {"fill_distance", fill},
                {"fill_probe_spacing", cfg.fill_probe_spacing()},
                {"solver", diagnostics_json(sol.diagnostics())}};
    write_json(cfg, "solution.json", doc);
    write_json(cfg, "timing.json",
               {{"assemble_seconds", s.assemble_seconds},
                {"solve_seconds", s.solve_seconds},
                {"geometry_seconds", geometry_seconds}});

    const int n = sol.set().dimension();
    auto csv = open_output(cfg, "beta.csv");
    csv << "k," << coordinate_header(n);
    for (const auto& [i, j] : component_pairs(n)) {
        csv << ",beta_" << i << j;
    }
    csv << '\n';
    for (std::size_t k = 0; k < sol.set().size(); ++k) {
        csv << k << ',' << coordinates(sol.set().data()[k].x);
        for (const auto& [i, j] : component_pairs(n)) {
            csv << ',' << fmt(sol.beta()[k](i, j));
        }
        csv << '\n';
    }

    out << "solved " << sol.set().size() << " points, " << sol.set().functional_count()
        << " unknowns, relative residual " << sol.diagnostics().relative_residual << '\n';
    if (sol.diagnostics().regularized) {
        out << "WARNING: collocation matrix was regularized (eps = "
            << sol.diagnostics().regularization << ")\n";
    }
    return success;
}

int cmd_convergence(const RunConfig& cfg, std::ostream& out) {
    const ProblemSetup setup = setup_from(cfg);
    if (!setup.exact) {
        throw ConfigError("system '" + cfg.system + "' has no exact metric; convergence needs one");
    }
    const RadialKernel kernel = wendland_c8(cfg.kernel_c);
    const PointList check = make_grid(cfg.check_grid);
    const ConvergenceReport report =
        convergence_study(setup, kernel, cfg.alphas, cfg.grid.lower, cfg.grid.upper, check,
                          {{cfg.threads, true}, {cfg.regularize}});

    const auto optional_cell = [](const std::optional<double>& v) {
        return v ? fmt(*v) : std::string();
    };
    auto csv = open_output(cfg, "convergence.csv");
    csv << "alpha,e_s,ratio_s,e,ratio\n";
    json timing = json::array();
    for (const auto& row : report.rows) {
        csv << fmt(row.alpha) << ',' << fmt(row.e_s) << ',' << optional_cell(row.ratio_s) << ','
            << fmt(row.e) << ',' << optional_cell(row.ratio) << '\n';
        out << "alpha " << row.alpha << ": N = " << row.points << ", e_s = " << row.e_s
            << ", e = " << row.e;
        if (row.ratio_s) {
            out << ", ratios " << *row.ratio_s << " / " << *row.ratio;
        }
        out << '\n';
        timing.push_back({{"alpha", row.alpha}, {"seconds", row.seconds}});
    }
    csv << "reference,," << fmt(report.reference_ratio) << ",," << fmt(report.reference_ratio)
        << '\n';
    write_json(cfg, "timing.json", timing);
    return success;
}

int cmd_fields(const RunConfig& cfg, std::ostream& out) {
    const Solved s = solve_from(cfg);
    const auto& sol = *s.solution;
    const PointList grid = make_grid(cfg.evaluation_grid());
    const auto samples = field_export(sol, grid, cfg.threads);

    const int n = sol.set().dimension();
    auto csv = open_output(cfg, "fields.csv");
    csv << coordinate_header(n) << ",trace_S,det_S,trace_FS,neg_det_FS,min_eig_S,max_eig_FS\n";
    std::size_t s_fail = 0, fs_fail = 0, any_fail = 0;
    for (const auto& sample : samples) {
        csv << coordinates(sample.x) << ',' << fmt(sample.trace_S) << ',' << fmt(sample.det_S)
            << ',' << fmt(sample.trace_FS) << ',' << fmt(sample.neg_det_FS) << ','
            << fmt(sample.min_eig_S) << ',' << fmt(sample.max_eig_FS) << '\n';
        const bool s_ok = definiteness(sample.S) == Definiteness::positive_definite;
        const bool fs_ok = definiteness(sample.FS) == Definiteness::negative_definite;
        s_fail += !s_ok;
        fs_fail += !fs_ok;
        any_fail += !(s_ok && fs_ok);
    }
    write_json(cfg, "fields_summary.json",
               {{"samples", samples.size()},
                {"points", sol.set().size()},
                {"unknowns", sol.set().functional_count()},
                {"S_not_positive_definite", s_fail},
                {"FS_not_negative_definite", fs_fail},
                {"failures", any_fail},
                {"solver", diagnostics_json(sol.diagnostics())}});
    write_json(cfg, "timing.json",
               {{"assemble_seconds", s.assemble_seconds}, {"solve_seconds", s.solve_seconds}});

    out << samples.size() << " samples, " << any_fail
        << " where S is not positive definite or F(S) is not negative definite\n";
    return success;
}

int cmd_ellipses(const RunConfig& cfg, std::ostream& out) {
    const Solved s = solve_from(cfg);
    const auto& sol = *s.solution;
    if (sol.set().dimension() != 2) {
        throw ConfigError("ellipses are only available for planar systems");
    }
    auto csv = open_output(cfg, "ellipses.csv");
    csv << "anchor_id,x,y\n";
    json anchors = json::array();
    std::size_t flagged = 0;
    for (std::size_t id = 0; id < cfg.ellipses.anchors.size(); ++id) {
        const Vector& anchor = cfg.ellipses.anchors[id];
        if (anchor.size() != 2) {
            throw ConfigError("ellipse anchors must be planar points");
        }
        const Matrix s_x = eval_S(sol, anchor);
        const Definiteness d = definiteness(s_x);
        json entry = {{"id", id}, {"x", anchor[0]}, {"y", anchor[1]}, {"definiteness", to_string(d)}};
        if (d != Definiteness::positive_definite) {
            entry["status"] = "flagged";
            ++flagged;
            out << "anchor " << id << ": S is not positive definite, skipped\n";
        } else {
            entry["status"] = "ok";
            for (const auto& p : ellipse_points(anchor, s_x, cfg.ellipses.level, cfg.ellipses.samples)) {
                csv << id << ',' << fmt(p[0]) << ',' << fmt(p[1]) << '\n';
            }
        }
        anchors.push_back(entry);
    }
    write_json(cfg, "ellipses_summary.json",
               {{"level", cfg.ellipses.level}, {"samples", cfg.ellipses.samples}, {"anchors", anchors}});
    if (!cfg.ellipses.anchors.empty() && flagged == cfg.ellipses.anchors.size()) {
        out << "no anchor has a positive definite metric\n";
        return numerical_failure;
    }
    return success;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernel-based construction of contraction metrics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    bool regularize = false;
    unsigned threads = 0;
    std::vector<std::string> anchors;
    double level = 0.0;
    int samples = 0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "JSON run configuration")->required();
        sub->add_option("--output-dir", output_dir, "Directory for CSV/JSON artifacts");
        sub->add_flag("--regularize", regularize,
                      "Retry a failed factorization with a small diagonal shift");
        sub->add_option("--threads", threads, "Worker threads for assembly and evaluation")
            ->check(CLI::PositiveNumber);
    };
    auto* solve_cmd = app.add_subcommand("solve", "Solve the collocation system on the grid");
    auto* conv_cmd = app.add_subcommand("convergence", "Error table over a sequence of grids");
    auto* fields_cmd = app.add_subcommand("fields", "Sample S and F(S) on the evaluation grid");
    auto* ell_cmd = app.add_subcommand("ellipses", "Level sets of the metric around anchors");
    for (auto* sub : {solve_cmd, conv_cmd, fields_cmd, ell_cmd}) {
        add_common(sub);
    }
    ell_cmd->add_option("--anchor", anchors, "Anchor point 'x,y' (repeatable)");
    ell_cmd->add_option("--level", level, "Level v^T S v")->check(CLI::PositiveNumber);
    ell_cmd->add_option("--samples", samples, "Points per ellipse")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return success;
    } catch (const CLI::ParseError& ex) {
        err << ex.what() << "\n\n" << app.help();
        return config_error;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (regularize) cfg.regularize = true;
        if (threads) cfg.threads = threads;
        if (!anchors.empty()) {
            cfg.ellipses.anchors.clear();
            for (const auto& text : anchors) {
                std::istringstream is(text);
                double x = 0.0, y = 0.0;
                char comma = 0;
                if (!(is >> x >> comma >> y) || comma != ',') {
                    throw ConfigError("anchor '" + text + "' is not of the form x,y");
                }
                Vector p(2);
                p << x, y;
                cfg.ellipses.anchors.push_back(p);
            }
        }
        if (level > 0.0) cfg.ellipses.level = level;
        if (samples > 0) cfg.ellipses.samples = samples;

        if (*solve_cmd) return cmd_solve(cfg, out);
        if (*conv_cmd) return cmd_convergence(cfg, out);
        if (*fields_cmd) return cmd_fields(cfg, out);
        return cmd_ellipses(cfg, out);
    } catch (const ConfigError& ex) {
        err << "config error: " << ex.what() << '\n';
        return config_error;
    } catch (const InvalidParameter& ex) {
        err << "invalid parameter: " << ex.what() << '\n';
        return config_error;
    } catch (const FactorizationError& ex) {
        err << "numerical failure: " << ex.what() << " (pivot " << ex.pivot()
            << "); consider --regularize\n";
        return numerical_failure;
    } catch (const Error& ex) {
        err << "numerical failure: " << ex.what() << '\n';
        return numerical_failure;
    }
}

}  // namespace cmetric::cli
