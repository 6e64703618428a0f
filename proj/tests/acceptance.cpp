// Acceptance checks, one line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "equibox/equibox.hpp"

using namespace equibox;

namespace {

// Pinned tolerances and budgets.
constexpr double kTableSeconds = 5.0;
constexpr double kPlanarLawSeconds = 1.0;
constexpr double kOracleSeconds = 60.0;
constexpr double kGridTol = 1e-4;
constexpr unsigned kGridRestarts = 200;
constexpr double kGridSeconds = 120.0;
constexpr double kCloudTol = 5e-3;
constexpr double kCloudSeconds = 600.0;
constexpr std::uint64_t kMixtureSeed = 7;
constexpr std::uint64_t kCloudSeed = 11;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(t0);
    std::printf("criterion %d: %s  %s (%.2f s)%s%s\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), secs,
                o.detail.empty() ? "" : "  ", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

std::string cli_output(const std::vector<std::string>& args, int* code = nullptr) {
    std::ostringstream out, err;
    const int rc = cli::run(args, out, err);
    if (code) *code = rc;
    return out.str();
}

Monomial mono(std::initializer_list<unsigned> exps) {
    std::vector<unsigned> v(exps);
    return Monomial(std::span<const unsigned>(v));
}

Outcome table_reproduction() {
    Outcome o;
    const auto t0 = Clock::now();
    int code = -1;
    const auto j = nlohmann::json::parse(cli_output({"--json", "table", "--m", "3", "--l-max", "22"}, &code));
    o.require(code == 0, "table exited nonzero");
    auto expected = [](unsigned l) -> unsigned {
        if (l == 2) return 4;
        if (l <= 4) return 7;
        if (l <= 6) return 8;
        if (l <= 10) return 13;
        if (l <= 12) return 15;
        if (l <= 14) return 16;
        return 25;
    };
    o.require(j.at("rows").size() == 21, "expected 21 rows");
    for (const auto& row : j.at("rows")) {
        const unsigned l = row.at("l"), d = row.at("d");
        o.require(d == expected(l), "l=" + std::to_string(l) + " gave d=" + std::to_string(d));
    }
    o.require(seconds_since(t0) < kTableSeconds, "runtime over budget");
    return o;
}

Outcome planar_laws() {
    Outcome o;
    const auto t0 = Clock::now();
    for (unsigned k = 1; k + 1 <= 20; ++k) {
        o.require(min_dimension(2, 2 * k) == k + 1, "even law fails at k=" + std::to_string(k));
        o.require(min_dimension(2, 2 * k - 1) == k + 1, "odd law fails at k=" + std::to_string(k));
    }
    const auto y = PolyGF2::variable(2, 1);
    const auto x_plus_y = PolyGF2::parse("x1+x2", 2);
    for (unsigned d = 1; d <= 20; ++d) {
        const auto p = y.pow(d - 1) * x_plus_y.pow(d);
        o.require(in_monomial_ideal(p, d), "not in (x^d, y^d) at d=" + std::to_string(d));
        o.require(!in_monomial_ideal(p, d + 1), "in (x^(d+1), y^(d+1)) at d=" + std::to_string(d));
    }
    o.require(seconds_since(t0) < kPlanarLawSeconds, "runtime over budget");
    return o;
}

Outcome triple_witness() {
    Outcome o;
    const auto reduced = dickson_product(3).divided_by(mono({1, 0, 0}));
    const auto p = PolyGF2::parse("x2+x3", 3) * reduced.pow(3);
    o.require(p.coefficient(mono({7, 7, 5})), "x1^7*x2^7*x3^5 missing");
    o.require(p.coefficient(mono({7, 5, 7})), "x1^7*x2^5*x3^7 missing");
    o.require(certify(3, 6, 8).verdict == Verdict::Certified, "certify(3, 6, 8) not CERTIFIED");
    return o;
}

Outcome dickson_identities() {
    Outcome o;
    for (unsigned m = 1; m <= 4; ++m) {
        const auto a = dickson_product(m), b = dickson_moore(m);
        o.require(a.terms() == b.terms(), "product and Moore differ at m=" + std::to_string(m));
    }
    o.require(dickson_moore(4).size() == 24, "Moore form for m=4 does not have 24 terms");
    return o;
}

struct Spec {
    unsigned m, l;
};

std::vector<Spec> oracle_specs() {
    std::vector<Spec> specs;
    for (unsigned m = 2; m <= 3; ++m)
        for (unsigned l = 1; l <= 9; ++l) specs.push_back({m, l});
    for (unsigned l = 1; l <= 5; ++l) specs.push_back({4, l});
    return specs;
}

std::vector<CharacterTable> oracle_tables;

Outcome oracle_equivalence() {
    Outcome o;
    const auto t0 = Clock::now();
    for (const auto [m, l] : oracle_specs()) {
        const std::string tag = "(m=" + std::to_string(m) + ", l=" + std::to_string(l) + ")";
        const auto table = character_multiplicities(build_test_representation(m, l));
        oracle_tables.push_back(table);
        const auto idx = index_polynomial(table);
        o.require(std::holds_alternative<PolyGF2>(idx), "fixed point at " + tag);
        if (std::holds_alternative<PolyGF2>(idx))
            o.require(std::get<PolyGF2>(idx) == criterion_polynomial(m, l), "index differs from criterion at " + tag);
        if (m == 3 && l % 2 == 0) {
            const unsigned k = l / 2;
            o.require(table.total_dim == 6 * k + 1, "dim V is not 6k+1 at " + tag);
            o.require(table.multiplicity(0b110) == k + 1, "x2+x3 multiplicity is not k+1 at " + tag);
            o.require(table.multiplicity(0b001) == 0, "x1 appears at " + tag);
            for (Character chi : {0b010u, 0b100u, 0b011u, 0b101u, 0b111u})
                o.require(table.multiplicity(chi) == k, character_name(chi, 3) + " multiplicity is not k at " + tag);
        }
    }
    o.require(seconds_since(t0) < kOracleSeconds, "runtime over budget");
    return o;
}

Outcome trivial_audit() {
    Outcome o;
    const auto specs = oracle_specs();
    o.require(oracle_tables.size() == specs.size(), "criterion 5 tables unavailable");
    for (std::size_t i = 0; i < oracle_tables.size(); ++i)
        o.require(oracle_tables[i].multiplicity(0) == 0,
                  "trivial character at (m=" + std::to_string(specs[i].m) + ", l=" + std::to_string(specs[i].l) + ")");
    return o;
}

Outcome planar_mixture() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto mu = rasterize_grid(random_mixture(2, 3, kMixtureSeed), 256);
    SolveOptions opts;
    opts.tol = kGridTol;
    opts.max_restarts = kGridRestarts;
    const auto rep = solve_equipartition(mu, 2, 2, opts);
    o.require(rep.status == SolveStatus::Converged, "NOT_CONVERGED");
    o.require(rep.residual_max <= kGridTol, "residual_max above tolerance");
    o.require(rep.restarts_used <= kGridRestarts, "restart budget exceeded");
    o.require(seconds_since(t0) < kGridSeconds, "runtime over budget");

    // Independent check: reload measure and configuration from disk.
    const auto dir = std::filesystem::temp_directory_path();
    const auto grid_path = (dir / "equibox_acceptance_grid.json").string();
    const auto cfg_path = (dir / "equibox_acceptance_config.json").string();
    std::ofstream(grid_path) << grid_to_json(*mu.grid()).dump();
    std::ofstream(cfg_path) << solve_report_to_json(rep).dump();
    std::ifstream cfg_in(cfg_path);
    const auto reloaded = load_measure(grid_path);
    const auto v = verify_configuration(reloaded, config_from_json(nlohmann::json::parse(cfg_in)), kGridTol);
    o.require(v.pass, "verify FAIL, max deviation " + std::to_string(v.max_deviation));
    std::filesystem::remove(grid_path);
    std::filesystem::remove(cfg_path);
    char buf[96];
    std::snprintf(buf, sizeof buf, "residual_max=%.3g restarts=%u", rep.residual_max, rep.restarts_used);
    if (o.pass) o.detail = buf;
    return o;
}

Outcome spatial_cloud() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto mu = sample_point_cloud(random_mixture(4, 3, kCloudSeed), 200000, kCloudSeed);
    SolveOptions opts;
    opts.tol = kCloudTol;
    const auto rep = solve_equipartition(mu, 2, 3, opts);
    o.require(rep.status == SolveStatus::Converged, "NOT_CONVERGED");
    o.require(rep.residual_max <= kCloudTol, "residual_max above tolerance");
    o.require(verify_configuration(mu, rep.config, kCloudTol).pass, "verify FAIL");
    o.require(seconds_since(t0) < kCloudSeconds, "runtime over budget");
    char buf[96];
    std::snprintf(buf, sizeof buf, "residual_max=%.3g restarts=%u", rep.residual_max, rep.restarts_used);
    if (o.pass) o.detail = buf;
    return o;
}

PolyGF2 random_poly(std::mt19937_64& rng, std::size_t nvars) {
    std::uniform_int_distribution<unsigned> e(0, 4), count(0, 8);
    std::vector<Monomial> terms;
    for (unsigned i = count(rng); i > 0; --i) {
        Monomial m(nvars);
        for (std::size_t v = 0; v < nvars; ++v) m.set(v, e(rng));
        terms.push_back(m);
    }
    return PolyGF2(nvars, std::move(terms));
}

Outcome property_suites() {
    Outcome o;
    std::mt19937_64 rng(9);

    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t nv = 1 + trial % 4;
        const auto a = random_poly(rng, nv), b = random_poly(rng, nv), c = random_poly(rng, nv);
        o.require(a + b == b + a && (a + b) + c == a + (b + c), "addition law");
        o.require(a * b == b * a && (a * b) * c == a * (b * c), "multiplication law");
        o.require(a * (b + c) == a * b + a * c, "distributive law");
        o.require((a + a).is_zero() && a * PolyGF2::one(nv) == a, "identity law");
    }

    std::normal_distribution<double> g;
    auto unit = [&](std::size_t d) {
        Vec v(d);
        for (auto& x : v) x = g(rng);
        return normalized(v);
    };
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 2 + trial % 3;
        const unsigned l = 1 + trial % 4, m = 2 + trial % 3;
        Vec coords(100 * d), weights(100);
        for (auto& x : coords) x = g(rng);
        for (auto& w : weights) w = 0.5 + std::abs(g(rng));
        const auto mu = Measure::point_cloud(d, coords, weights);
        const auto& pc = *mu.cloud();
        Configuration cfg;
        cfg.u = unit(d);
        for (unsigned j = 0; j + 1 < m; ++j) {
            cfg.extra_dirs.push_back(unit(d));
            cfg.extra_offsets.push_back(0.5 * g(rng));
        }
        for (unsigned i = 0; i < l; ++i) cfg.parallel_offsets.push_back(g(rng));
        std::sort(cfg.parallel_offsets.begin(), cfg.parallel_offsets.end());
        const auto t = box_mass_tensor(mu, cfg);

        // brute-force classification
        Vec scan(t.masses.size(), 0.0);
        for (std::size_t i = 0; i < pc.size(); ++i) {
            double pu = 0.0;
            for (std::size_t k = 0; k < d; ++k) pu += pc.coords[i * d + k] * cfg.u[k];
            unsigned slab = 0;
            for (double off : cfg.parallel_offsets) slab += off < pu;
            unsigned bits = 0;
            for (unsigned j = 0; j + 1 < m; ++j) {
                double pv = 0.0;
                for (std::size_t k = 0; k < d; ++k) pv += pc.coords[i * d + k] * cfg.extra_dirs[j][k];
                if (pv > cfg.extra_offsets[j]) bits |= 1u << j;
            }
            scan[(static_cast<std::size_t>(slab) << (m - 1)) | bits] += pc.weights[i];
        }
        o.require(scan == t.masses, "classification differs from brute-force scan");

        // u -> -u reverses slabs; v_j -> -v_j flips bit j
        Configuration neg = cfg;
        for (auto& x : neg.u) x = -x;
        for (std::size_t i = 0; i < l; ++i) neg.parallel_offsets[i] = -cfg.parallel_offsets[l - 1 - i];
        for (auto& x : neg.extra_dirs[0]) x = -x;
        neg.extra_offsets[0] = -cfg.extra_offsets[0];
        const auto tn = box_mass_tensor(mu, neg);
        for (unsigned s = 0; s <= l; ++s)
            for (std::uint32_t b = 0; b < (1u << (m - 1)); ++b)
                o.require(tn.at({l - s, b ^ 1u}) == t.at({s, b}), "equivariance broken");
    }

    const auto path = (std::filesystem::temp_directory_path() / "equibox_acceptance_cloud.csv").string();
    int code = -1;
    cli_output({"gen-measure", "--kind", "gaussian-mixture", "--d", "3", "--components", "3", "--n", "5000",
                "--seed", "5", "--out", path},
               &code);
    o.require(code == 0, "gen-measure failed");
    const std::vector<std::string> solve{"solve", "--input", path, "--l", "2", "--m", "2", "--tol", "5e-3", "--seed", "17"};
    const auto first = cli_output(solve), second = cli_output(solve);
    o.require(!first.empty() && first == second, "solve output differs between identical runs");
    std::filesystem::remove(path);
    return o;
}

} // namespace

int main() {
    report(1, "m=3 table reproduced", table_reproduction);
    report(2, "m=2 laws for d <= 20", planar_laws);
    report(3, "m=3, l=6, d=8 witnesses", triple_witness);
    report(4, "Dickson product equals Moore form", dickson_identities);
    report(5, "index polynomial equals criterion", oracle_equivalence);
    report(6, "trivial character absent", trivial_audit);
    report(7, "planar 3-Gaussian grid, l=2, m=2", planar_mixture);
    report(8, "R^4 point cloud, N=200000, l=2, m=3", spatial_cloud);
    report(9, "property suites", property_suites);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
