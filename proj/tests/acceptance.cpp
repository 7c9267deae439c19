// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--allow-fail N[,M...]]
//
// Exit status is non-zero when a criterion fails, unless its number is in the
// allow-fail list (the line still reads FAIL).

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gscr/boundary.hpp"
#include "gscr/run.hpp"

using namespace gscr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> check;
};

AcNetwork triple() {
    AcNetwork net;
    net.buses = {{"1", 1.0 / 1.5, true}, {"2", 1.0 / 3.0, true}, {"3", 1.0 / 3.0, true}};
    net.branches = {{"1", "2", 1.0 / 1.5}, {"1", "3", 1.0 / 1.5}, {"2", "3", 1.0 / 1.5}};
    return net;
}

ConverterSet converters(std::vector<double> t, std::vector<double> p = {1.0, 1.0, 1.0}) {
    return {std::move(p), std::move(t)};
}

std::vector<double> const kBaseT{1.24, 1.5, 1.75};
std::vector<std::vector<double>> const kTableRows{{1.2444, 1.5, 1.7455},
                                                  {1.1786, 1.5, 1.8056},
                                                  {1.1118, 1.5, 1.8652},
                                                  {1.0439, 1.5, 1.9245}};
ContourAxes const kAxes{"1", "2"};

LoadingDirection along_bus2(std::vector<double> t, double lo = 1.0, double hi = 1.8) {
    return {converters(std::move(t)), "2", lo, hi};
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string pct(double v) { return fmt::format("{:.3f}%", 100.0 * v); }

// --- 1-4: closed forms and the benchmark ---

Outcome cgscr_closed_form() {
    double const c = cgscr_star(1.5);
    return {near(c, 2.0, 1e-12), fmt::format("cgscr_star(1.5) = {:.15g}", c)};
}

Outcome single_infeed() {
    AcNetwork net;
    net.buses = {{"1", 0.5, true}};
    auto const r = analyze(net, ConverterSet{{1.0}, {1.5}});
    return {near(r.gscr, 2.0, 1e-9) && near(r.margin, 0.0, 1e-9),
            fmt::format("gSCR = {:.12g}, margin = {:.3g}", r.gscr, r.margin)};
}

Outcome base_case() {
    auto const r = analyze(triple(), converters(kBaseT));
    double const l1 = (9.0 - 3.0 * std::sqrt(2.0)) / 2.0;
    bool ok = near(r.gscr, 2.37868, 1e-4) && near(r.gscr, l1, 1e-12) &&
              near(r.t_star, 1.4325, 1e-4) && near(r.cgscr_star, 1.94630, 1e-4);
    Eigen::Vector3d const w(0.5, 0.25, 0.25);
    ok = ok && (r.weights - w).cwiseAbs().maxCoeff() <= 1e-6;
    return {ok, fmt::format("gSCR = {:.6f}, w = ({:.6f}, {:.6f}, {:.6f}), T* = {:.6f}, CgSCR* = {:.6f}",
                            r.gscr, r.weights(0), r.weights(1), r.weights(2), r.t_star,
                            r.cgscr_star)};
}

Outcome homogeneous_exactness() {
    auto const c = compare_boundaries(triple(), along_bus2({1.5, 1.5, 1.5}));
    double const rel = std::abs(c.p_exact - c.p_approx) / c.p_exact;
    return {rel < 1e-6, fmt::format("p_exact = {:.9f}, p_approx = {:.9f}, rel = {:.2e}", c.p_exact,
                                    c.p_approx, rel)};
}

// --- 5-7: loading experiments ---

Outcome sweep_property() {
    auto const net = triple();
    double const p_dmax = find_exact_boundary(net, along_bus2(kBaseT));
    auto const stable = sweep(net, along_bus2(kBaseT, 1.0, p_dmax), 50);

    auto const wide = sweep(net, along_bus2(kBaseT, 1.0, 1.8), 50);
    auto const crossing = sweep_crossing(wide, [](StrengthReport const& r) { return r.gscr - r.cgscr_star; });
    double const root = find_approx_boundary(net, along_bus2(kBaseT));
    double const dist = crossing ? std::abs(*crossing - root) : INFINITY;

    bool const ok = stable.failed == 0 && stable.gscr_strictly_decreasing && wide.gscr_strictly_decreasing &&
                    stable.cgscr_star_variation < 0.02 && dist <= 1e-3;
    return {ok, fmt::format("gSCR strictly decreasing: {}, CgSCR* variation {} on [1, {:.4f}], "
                            "crossing {:.5f} vs root {:.5f}",
                            stable.gscr_strictly_decreasing && wide.gscr_strictly_decreasing,
                            pct(stable.cgscr_star_variation), p_dmax, crossing.value_or(NAN), root)};
}

Outcome boundary_error() {
    auto const net = triple();
    auto const conv = converters(kBaseT);
    auto const grid = linspace(1.0, 1.4, 41);
    auto const gaps = boundary_gaps(net, conv, grid, kAxes);
    double p2_gap = 0.0, gscr_gap = 0.0;
    for (auto const& g : gaps) {
        p2_gap = std::max(p2_gap, g.grid_gap);
        gscr_gap = std::max(gscr_gap, g.gscr_gap);
    }
    // Gap in P_N1 at equal P_N2, for reference.
    auto const crit = gscr_contour(net, conv, ContourTarget::critical(), grid, kAxes);
    auto const sing = gscr_contour(net, conv, ContourTarget::singular(), grid, kAxes);
    double p1_gap = 0.0;
    for (std::size_t k = 0; k < std::min(crit.points.size(), sing.points.size()); ++k) {
        p1_gap = std::max(p1_gap, std::abs(crit.points[k].p_solve - sing.points[k].p_solve) /
                                      sing.points[k].p_solve);
    }
    bool const ok = gaps.size() == grid.size() && p2_gap <= 0.006;
    return {ok, fmt::format("max P_N2 gap at fixed P_N1 = {} (limit 0.600%); "
                            "for reference: P_N1 gap {}, gSCR gap {}",
                            pct(p2_gap), pct(p1_gap), pct(gscr_gap))};
}

Outcome table_reproduction() {
    std::vector<double> const sd_expected{0.2505, 0.3135, 0.3768, 0.4400};
    std::vector<double> const err_expected{0.0033, 0.0052, 0.0075, 0.0101};
    auto const grid = linspace(1.0, 1.4, 41);
    auto const rows = inhomogeneity_study(triple(), converters(kBaseT), kTableRows, grid, kAxes);

    bool ok = rows.size() == 4;
    std::string detail;
    for (std::size_t i = 0; ok && i < rows.size(); ++i) {
        ok = ok && near(rows[i].std_dev, sd_expected[i], 1e-3) &&
             near(rows[i].max_rel_error, err_expected[i], 0.003) && rows[i].points == grid.size();
        if (i > 0) {
            ok = ok && rows[i].std_dev > rows[i - 1].std_dev &&
                 rows[i].max_rel_error > rows[i - 1].max_rel_error;
        }
        detail += fmt::format("{}[sd {:.4f}, err {}]", i ? " " : "", rows[i].std_dev, pct(rows[i].max_rel_error));
    }
    return {ok, detail};
}

// --- 8-10: perturbation theory ---

double slope(std::vector<double> const& x, std::vector<double> const& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto const n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double const lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Slope of the worst error over the ensemble at each perturbation size. A
// single matrix can have its second- and third-order terms cancel near one
// size, which bends its own curve.
Outcome perturbation_order() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::normal_distribution<double> g;
    int const n = 5, matrices = 200, points = 9;
    std::vector<double> sizes, worst(points, 0.0), slopes;
    for (int k = 0; k < points; ++k) sizes.push_back(1e-1 * std::pow(10.0, -0.5 * k));  // 1e-1 .. 1e-5

    for (int trial = 0; trial < matrices; ++trial) {
        Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) x(i, j) += u(rng);
        Eigen::VectorXd const d = Eigen::VectorXd::LinSpaced(n, 1.0, n);
        Eigen::MatrixXd const y = x.inverse().transpose();
        Eigen::MatrixXd const a = x * d.asDiagonal() * y.transpose();
        Eigen::MatrixXd e0(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) e0(i, j) = g(rng);
        e0 /= e0.operatorNorm();

        std::vector<double> errors;
        for (int k = 0; k < points; ++k) {
            double const t = sizes[static_cast<std::size_t>(k)];
            EigenTriple const triple{d(0), x.col(0), y.col(0)};
            double const est = perturbed_eigenvalue(a, t * e0, triple);
            Eigen::EigenSolver<Eigen::MatrixXd> es(a + t * e0, false);
            double exact = es.eigenvalues()(0).real();
            for (Eigen::Index i = 1; i < n; ++i)
                if (std::abs(es.eigenvalues()(i) - est) < std::abs(exact - est)) exact = es.eigenvalues()(i).real();
            errors.push_back(std::abs(est - exact));
            worst[static_cast<std::size_t>(k)] = std::max(worst[static_cast<std::size_t>(k)], errors.back());
        }
        slopes.push_back(slope(sizes, errors));
    }
    double const s = slope(sizes, worst);
    std::sort(slopes.begin(), slopes.end());
    auto const below = std::count_if(slopes.begin(), slopes.end(), [](double v) { return v < 1.9; });
    return {s >= 1.9, fmt::format("slope of worst error over {} matrices = {:.4f}; per-matrix median {:.4f}, "
                                  "{} below 1.9",
                                  matrices, s, slopes[slopes.size() / 2], below)};
}

AcNetwork random_network(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> x(0.1, 1.5);
    std::bernoulli_distribution coin(0.5);
    AcNetwork net;
    for (int i = 0; i < n; ++i) {
        BusSpec b{std::to_string(i + 1), std::nullopt, true};
        if (i == 0 || coin(rng)) b.thevenin_x = x(rng);
        net.buses.push_back(b);
    }
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        net.branches.push_back({std::to_string(pick(rng) + 1), std::to_string(i + 1), x(rng)});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng) && coin(rng)) net.branches.push_back({std::to_string(i + 1), std::to_string(j + 1), x(rng)});
    return net;
}

Outcome gerschgorin_certificate() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> p(0.3, 3.0);
    std::uniform_int_distribution<int> size(2, 6);
    int applicable = 0, held = 0, draws = 0;
    while (applicable < 1000 && draws < 100000) {
        ++draws;
        int const n = size(rng);
        auto const net = random_network(rng, n);
        std::normal_distribution<double> t(1.5, 0.05 + 0.2 * (draws % 5));
        ConverterSet conv;
        for (int i = 0; i < n; ++i) {
            conv.rated_power.push_back(p(rng));
            conv.control.push_back(t(rng));
        }
        auto const b = build_susceptance(net);
        auto const r = analyze(b, conv);
        if (!(r.diagnostics.validity < 1.0)) continue;
        ++applicable;

        // Exact critical eigenvalue from the symmetric similar form of J_sys.
        Eigen::VectorXd const s = Eigen::Map<Eigen::VectorXd const>(conv.rated_power.data(), n).cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd const sym = s.asDiagonal() * b.entries * s.asDiagonal();
        Eigen::MatrixXd m = sym.inverse() - sym;
        for (int i = 0; i < n; ++i) m(i, i) += conv.control[static_cast<std::size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        auto const& ev = es.eigenvalues();
        double exact = ev(0);
        for (Eigen::Index i = 1; i < n; ++i)
            if (std::abs(ev(i) - r.lambda_crit_approx) < std::abs(exact - r.lambda_crit_approx)) exact = ev(i);
        if (std::abs(exact - r.lambda_crit_approx) <= r.diagnostics.radius + 1e-12) ++held;
    }
    return {applicable == 1000 && held == applicable,
            fmt::format("{}/{} trials inside the radius ({} draws)", held, applicable, draws)};
}

Outcome remark_diagnostic() {
    auto const net = triple();
    double const p = find_exact_boundary(net, along_bus2(kTableRows[3]));
    auto const r = analyze(net, converters(kTableRows[3], {1.0, p, 1.0}));
    double const ratio = r.diagnostics.epsilon / r.diagnostics.delta;
    return {ratio >= 0.1 && ratio <= 0.3,
            fmt::format("at P_N2 = {:.6f}: eps = {:.4f}, delta = {:.4f}, eps/delta = {:.4f}, 16n eps^2/delta^2 = {:.3f}",
                        p, r.diagnostics.epsilon, r.diagnostics.delta, ratio, r.diagnostics.validity)};
}

// --- 11: CLI determinism ---

std::string slurp(fs::path const& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    auto const root = fs::temp_directory_path() / "gscr_acceptance";
    fs::remove_all(root);
    auto const cfg = (fs::path(GSCR_CONFIG_DIR) / "table1.json").string();
    std::vector<std::string> csv;
    for (char const* run : {"a", "b"}) {
        auto const out = root / run;
        auto const cmd = fmt::format("{} study {} --out {} >/dev/null", GSCR_BINARY, cfg, out.string());
        if (std::system(cmd.c_str()) != 0) return {false, "gscr study exited with an error"};
        csv.push_back(slurp(out / "study.csv"));
    }
    bool const ok = !csv[0].empty() && csv[0] == csv[1];
    return {ok, fmt::format("study.csv {} bytes, identical: {}", csv[0].size(), csv[0] == csv[1])};
}

std::set<int> parse_allow_fail(int argc, char** argv) {
    std::set<int> out;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) != "--allow-fail") continue;
        std::stringstream ss(argv[i + 1]);
        std::string item;
        while (std::getline(ss, item, ',')) out.insert(std::stoi(item));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    auto const allowed = parse_allow_fail(argc, argv);
    std::vector<Criterion> const criteria{
        {1, "CgSCR closed form", 0.1, cgscr_closed_form},
        {2, "single-infeed reduction", 0.1, single_infeed},
        {3, "benchmark base case", 0.1, base_case},
        {4, "homogeneous exactness", 0.1, homogeneous_exactness},
        {5, "loading sweep property", 1.0, sweep_property},
        {6, "boundary error at fixed P_N1", 5.0, boundary_error},
        {7, "inhomogeneity table", 20.0, table_reproduction},
        {8, "perturbation order", 1.0, perturbation_order},
        {9, "Gerschgorin certificate", 5.0, gerschgorin_certificate},
        {10, "eps/delta diagnostic", 1.0, remark_diagnostic},
        {11, "study determinism", 30.0, determinism},
    };

    int failed = 0, tolerated = 0;
    for (auto const& c : criteria) {
        auto const start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (std::exception const& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool const in_time = secs < c.budget_s;
        bool const pass = o.pass && in_time;
        fmt::print("[{}] {:2d} {}: {}{} ({:.3f} s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail,
                   in_time ? "" : fmt::format(", over the {:g} s budget", c.budget_s), secs);
        if (!pass) (allowed.count(c.id) ? tolerated : failed) += 1;
    }
    fmt::print("{} of {} criteria passed", static_cast<int>(criteria.size()) - failed - tolerated,
               criteria.size());
    if (tolerated) fmt::print(" ({} known failure(s) tolerated)", tolerated);
    fmt::print("\n");
    return failed == 0 ? 0 : 1;
}
