// Acceptance harness: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cmetric/evaluate.hpp"

#include "support/oracles.hpp"
#include "support/systems.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

namespace {

using namespace cmetric;
namespace fs = std::filesystem;

constexpr double c = 0.9;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const std::string& id, const std::string& title, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << " " << title << ": " << o.detail << std::endl;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

GridSpec square(double half, double spacing, double offset = 0.0) {
    return {vec2(-half, -half), vec2(half, half), spacing, offset};
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cmetric_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

struct StudyResult {
    ConvergenceReport report;
    double worst_interpolation = 0.0;   // max over solves of max |F(S)(x_k) + C| / |C|_max
};

StudyResult run_study() {
    const auto setup = linear_example();
    StudyResult result;
    ConvergenceOptions opts;
    opts.inspect = [&](double alpha, const RecoverySolution& sol) {
        double worst = 0.0;
        for (const auto& x : sol.set().points()) {
            worst = std::max(worst, testing::max_abs(eval_FS(sol, x) + sol.rhs()));
        }
        worst /= testing::max_abs(sol.rhs());
        result.worst_interpolation = std::max(result.worst_interpolation, worst);
        std::cout << "  alpha = " << alpha << ": " << sol.set().functional_count()
                  << " unknowns, interpolation defect " << fmt(worst) << std::endl;
    };
    result.report = convergence_study(setup, wendland_c8(c), {0.5, 0.25, 0.125, 0.0625, 0.03125}, vec2(-1, -1),
                                      vec2(1, 1), make_grid(square(1.0, 1.0 / 64.0, 1.0 / 128.0)), opts);
    return result;
}

Outcome table_reproduction(const ConvergenceReport& rep) {
    const double e_s[] = {2.5724, 1.2833, 0.3516, 0.0329, 0.0025};
    const double e[] = {1.2334, 0.9169, 0.0124, 5.6040e-4, 1.6311e-5};
    Outcome o;
    std::ostringstream ss;
    for (std::size_t t = 0; t < rep.rows.size(); ++t) {
        const double ds = std::abs(rep.rows[t].e_s - e_s[t]) / e_s[t];
        const double d = std::abs(rep.rows[t].e - e[t]) / e[t];
        if (ds > 0.1 || d > 0.1) o.pass = false;
        ss << "alpha=" << rep.rows[t].alpha << " e_s=" << fmt(rep.rows[t].e_s) << " e=" << fmt(rep.rows[t].e)
           << "; ";
    }
    o.detail = ss.str() + "tolerance 10% relative";
    return o;
}

Outcome convergence_rate(const ConvergenceReport& rep) {
    const double threshold = rep.reference_ratio / 2.0;
    bool crossed = false, stays = true;
    std::ostringstream ss;
    for (const auto& row : rep.rows) {
        if (!row.ratio_s) continue;
        ss << fmt(*row.ratio_s) << " ";
        if (*row.ratio_s > threshold) {
            crossed = true;
        } else if (crossed) {
            stays = false;
        }
    }
    const double last = rep.rows.back().ratio_s.value_or(0.0);
    return {last >= 8.0 && crossed && stays,
            "ratios " + ss.str() + "(final >= 8, stays above " + fmt(threshold) + " once crossed)"};
}

Outcome oracle_suite() {
    std::mt19937_64 rng(2024);
    const auto kernel = wendland_c8(c);
    double a_grad = 0.0, a_hess = 0.0, b = 0.0, cc = 0.0, d = 0.0;

    for (int t = 0; t < 100; ++t) {
        const Vector y = testing::random_point(rng, 2);
        const Vector x = testing::random_point_near(rng, y, 0.02, 0.9 / c);
        a_grad = std::max(a_grad, testing::relative_error(kernel.grad1_phi(x, y), testing::fd_grad1_phi(x, y, c)));
        a_hess = std::max(a_hess, testing::relative_error(kernel.hess12_phi(x, y), testing::fd_hess12_phi(x, y, c)));
    }

    for (const auto& sys : {linear_example().system, testing::damped_pendulum(), testing::spiral3d()}) {
        const int n = sys.dimension;
        const auto pairs = component_pairs(n);
        for (int t = 0; t < 20; ++t) {
            const auto cp = CollocationPointData::at(sys, testing::random_point(rng, n));
            const Vector x = testing::random_point_near(rng, cp.x, 0.05, 0.9 / c);
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu) {
                    b = std::max(b, testing::relative_error(
                                        representer_column(kernel, cp, x, mu, nu),
                                        testing::brute_force_representer_column(sys, c, cp.x, x, mu, nu)));
                }
            const auto cl = CollocationPointData::at(sys, x);
            const int m = static_cast<int>(pairs.size());
            Matrix block(m, m), oracle(m, m);
            for (int q = 0; q < m; ++q) {
                const Matrix applied = testing::double_application(sys, kernel, cp, pairs[q].first, pairs[q].second, x);
                for (int p = 0; p < m; ++p) {
                    block(p, q) = gram_entry(kernel, cl, {0, pairs[p].first, pairs[p].second}, cp,
                                             {1, pairs[q].first, pairs[q].second});
                    oracle(p, q) = applied(pairs[p].first, pairs[p].second);
                }
            }
            cc = std::max(cc, testing::relative_error(block, oracle));
        }
    }

    const auto sys = testing::damped_pendulum();
    const auto sol = solve(assemble(sys, kernel, make_grid(square(1.0, 0.5))), kernel, Matrix::Identity(2, 2));
    for (int t = 0; t < 50; ++t) {
        const Vector x = testing::random_point(rng, 2);
        const Vector fx = sys.f(x);
        const double h = 1e-5;
        const Matrix fd = (eval_S(sol, x + h * fx) - eval_S(sol, x - h * fx)) / (2.0 * h);
        d = std::max(d, testing::relative_error(eval_orbital_derivative(sol, x), fd));
    }

    const bool pass = a_grad <= 1e-6 && a_hess <= 1e-5 && b <= 1e-6 && cc <= 1e-5 && d <= 1e-5;
    return {pass, "(a) grad " + fmt(a_grad) + " hess " + fmt(a_hess) + ", (b) " + fmt(b) + ", (c) " + fmt(cc) +
                      ", (d) " + fmt(d)};
}

Outcome structural_invariants() {
    std::mt19937_64 rng(99);
    const auto kernel = wendland_c8(c);
    double asym = 0.0, index_sym = 0.0, forms = 0.0, perm = 0.0;
    int spd = 0;
    for (int t = 0; t < 20; ++t) {
        const auto sys = t % 2 == 0 ? testing::damped_pendulum() : testing::spiral3d();
        PointList pts;
        for (int k = 0; k < 10; ++k) pts.push_back(testing::random_point(rng, sys.dimension));
        auto a = assemble(sys, kernel, pts, {1, false});
        asym = std::max(asym, asymmetry(a.gram));
        solve(std::move(a), kernel, Matrix::Identity(sys.dimension, sys.dimension));
        ++spd;
    }

    const auto sys = testing::damped_pendulum();
    for (int t = 0; t < 100; ++t) {
        const auto cp = CollocationPointData::at(sys, testing::random_point(rng, 2));
        const Vector x = testing::random_point(rng, 2);
        for (int mu = 0; mu < 2; ++mu)
            for (int nu = 0; nu < 2; ++nu) {
                index_sym = std::max(index_sym, testing::max_abs(representer_column(kernel, cp, x, mu, nu) -
                                                                 representer_column(kernel, cp, x, nu, mu).transpose()));
            }
    }

    auto pts = make_grid(square(1.0, 0.25));
    const Matrix rhs = Matrix::Identity(2, 2);
    const auto s1 = solve(assemble(sys, kernel, pts), kernel, rhs);
    std::shuffle(pts.begin(), pts.end(), rng);
    const auto s2 = solve(assemble(sys, kernel, pts), kernel, rhs);
    for (int t = 0; t < 50; ++t) {
        const Vector x = testing::random_point(rng, 2);
        const Matrix s = eval_S(s1, x);
        forms = std::max(forms, testing::max_abs(s - eval_S_from_representers(s1, x)) / std::max(1.0, testing::max_abs(s)));
        perm = std::max(perm, testing::max_abs(s - eval_S(s2, x)));
    }

    const bool pass = asym == 0.0 && spd == 20 && index_sym <= 1e-13 && forms <= 1e-10 && perm <= 1e-10;
    return {pass, "gram asymmetry " + fmt(asym) + ", SPD sets " + std::to_string(spd) + "/20, index symmetry " +
                      fmt(index_sym) + ", form1 vs form2 " + fmt(forms) + ", permutation " + fmt(perm)};
}

Outcome contraction_certificate() {
    cli::RunConfig cfg;
    cfg.grid = square(1.0, 0.125);
    cfg.output_dir = scratch_dir("certificate");
    std::ostringstream log;
    const int code = cli::cmd_fields(cfg, log);
    const auto summary = read_json(cfg.output_dir / "fields_summary.json");
    const int failed = summary["failures"].get<int>();
    const bool pass = code == cli::success && failed == 0;
    fs::remove_all(cfg.output_dir);
    return {pass, std::to_string(summary["samples"].get<int>()) + " check-grid samples, " + std::to_string(failed) +
                      " failures"};
}

Outcome final_example_scale() {
    cli::RunConfig cfg;
    cfg.grid = square(4.0, 0.2);
    cfg.eval_grid = square(4.0, 0.05);
    cfg.output_dir = scratch_dir("scale");
    std::ostringstream log;
    const auto start = std::chrono::steady_clock::now();
    const int code = cli::cmd_fields(cfg, log);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto summary = read_json(cfg.output_dir / "fields_summary.json");
    const auto points = summary["points"].get<int>();
    const auto unknowns = summary["unknowns"].get<int>();
    const bool csv = fs::exists(cfg.output_dir / "fields.csv") && fs::file_size(cfg.output_dir / "fields.csv") > 0;
    fs::remove_all(cfg.output_dir);
    const bool pass = code == cli::success && points == 1681 && unknowns == 5043 && csv && seconds < 120.0;
    return {pass, std::to_string(points) + " points, " + std::to_string(unknowns) + " unknowns, fields csv " +
                      (csv ? "written" : "missing") + ", " + fmt(seconds) + " s (limit 120 s)"};
}

}  // namespace

int main() {
    std::cout << "running convergence study (five grids, the finest takes minutes)" << std::endl;
    StudyResult study;
    std::string study_error;
    try {
        study = run_study();
    } catch (const std::exception& e) {
        study_error = e.what();
    }
    const auto needs_study = [&](const std::function<Outcome()>& f) {
        return [&, f]() -> Outcome {
            if (!study_error.empty()) return {false, "convergence study failed: " + study_error};
            return f();
        };
    };

    report("A1", "error table", needs_study([&] { return table_reproduction(study.report); }));
    report("A2", "convergence rate", needs_study([&] { return convergence_rate(study.report); }));
    report("A3", "interpolation exactness", needs_study([&]() -> Outcome {
               return {study.worst_interpolation <= 1e-8,
                       "max defect " + fmt(study.worst_interpolation) + " (limit 1e-8 |C|_max)"};
           }));
    report("A4", "oracle equivalence", oracle_suite);
    report("A5", "structural invariants", structural_invariants);
    report("A6", "contraction certificate", contraction_certificate);
    report("A7", "large domain run", final_example_scale);

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
