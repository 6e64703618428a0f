#pragma once

// Numerical search for an equipartition.
//
// Offsets are always eliminated through quantiles and medians, so the search
// runs over directions only: m vectors in R^d, normalized at every
// evaluation. The objective is the l2 norm of the deviation tensor; a
// configuration is accepted when its largest box deviation is within tol and
// no two directions are (anti)parallel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "equibox/box_index.hpp"
#include "equibox/certifier.hpp"
#include "equibox/error.hpp"
#include "equibox/measures.hpp"

namespace equibox {

/// Box masses minus the uniform target 1 / ((l+1) 2^(m-1)).
struct DeviationTensor {
    unsigned l = 0;
    unsigned m = 0;
    Vec values;
    double target = 0.0;
    double residual_max = 0.0;
    double residual_l2 = 0.0;
    double slab_residual_max = 0.0;    // max |slab mass - 1/(l+1)|
    double halving_residual_max = 0.0; // max |mass on 0 side of v_j - 1/2|
};

inline DeviationTensor deviation_from(const BoxMassTensor& t) {
    DeviationTensor dev{t.l, t.m, Vec(t.masses.size()), 1.0 / static_cast<double>(t.masses.size()), 0, 0, 0, 0};
    double sq = 0.0;
    for (std::size_t i = 0; i < t.masses.size(); ++i) {
        dev.values[i] = t.masses[i] - dev.target;
        dev.residual_max = std::max(dev.residual_max, std::abs(dev.values[i]));
        sq += dev.values[i] * dev.values[i];
    }
    dev.residual_l2 = std::sqrt(sq);
    for (unsigned s = 0; s <= t.l; ++s)
        dev.slab_residual_max = std::max(dev.slab_residual_max, std::abs(t.slab_mass(s) - 1.0 / (t.l + 1)));
    for (unsigned j = 0; j + 1 < t.m; ++j) {
        double zero_side = 0.0;
        for (std::size_t i = 0; i < t.masses.size(); ++i)
            if (((i >> j) & 1u) == 0) zero_side += t.masses[i];
        dev.halving_residual_max = std::max(dev.halving_residual_max, std::abs(zero_side - 0.5));
    }
    return dev;
}

/// Test-map value at one point of the configuration space.
struct Evaluation {
    Configuration config;
    BoxMassTensor masses;
    DeviationTensor deviation;
};

inline Evaluation test_map(const Measure& mu, std::span<const double> u, const std::vector<Vec>& extra_dirs, unsigned l) {
    Configuration cfg = complete_configuration(mu, u, extra_dirs, l);
    BoxMassTensor masses = box_mass_tensor(mu, cfg);
    DeviationTensor dev = deviation_from(masses);
    return {std::move(cfg), std::move(masses), std::move(dev)};
}

inline constexpr double kCollinearCos = 1.0 - 1e-9;

/// Pairs of directions that are parallel or antiparallel.
inline std::vector<std::string> collinearity_warnings(const Configuration& cfg) {
    std::vector<const Vec*> dirs{&cfg.u};
    for (const auto& v : cfg.extra_dirs) dirs.push_back(&v);
    auto name = [](std::size_t i) { return i == 0 ? std::string("u") : "v" + std::to_string(i); };
    std::vector<std::string> out;
    for (std::size_t a = 0; a < dirs.size(); ++a)
        for (std::size_t b = a + 1; b < dirs.size(); ++b) {
            const double na = norm(*dirs[a]), nb = norm(*dirs[b]);
            if (na > 0 && nb > 0 && std::abs(dot(*dirs[a], *dirs[b])) / (na * nb) > kCollinearCos)
                out.push_back("directions " + name(a) + " and " + name(b) + " are collinear");
        }
    return out;
}

struct VerifyReport {
    BoxMassTensor masses;
    double target = 0.0;
    double max_deviation = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::vector<std::string> warnings;
};

/// Recomputes every box mass from the stored directions and offsets.
inline VerifyReport verify_configuration(const Measure& mu, const Configuration& cfg, double tol) {
    VerifyReport rep;
    rep.masses = box_mass_tensor(mu, cfg);
    rep.target = 1.0 / static_cast<double>(rep.masses.masses.size());
    for (double x : rep.masses.masses) rep.max_deviation = std::max(rep.max_deviation, std::abs(x - rep.target));
    rep.tol = tol;
    rep.pass = rep.max_deviation <= tol;
    rep.warnings = collinearity_warnings(cfg);
    return rep;
}

enum class SolveStatus { Converged, NotConverged };

inline const char* to_string(SolveStatus s) noexcept {
    return s == SolveStatus::Converged ? "CONVERGED" : "NOT_CONVERGED";
}

struct SolveOptions {
    double tol = 1e-4;
    unsigned max_restarts = 200;
    std::uint64_t seed = 1;
    unsigned coarse_grid = 0;        // d = 2 only: angle samples per direction
    unsigned max_evals = 0;          // per restart; 0 picks 400 * (number of parameters)
};

inline constexpr const char* kSolverFailureNote =
    "NOT_CONVERGED in a certified regime indicates solver failure, not a counterexample";

struct SolveReport {
    SolveStatus status = SolveStatus::NotConverged;
    Configuration config;
    double residual_max = std::numeric_limits<double>::infinity();
    double residual_l2 = std::numeric_limits<double>::infinity();
    unsigned restarts_used = 0;
    std::uint64_t seed = 0;
    std::size_t evaluations = 0;
    unsigned l = 0;
    unsigned m = 0;
    std::size_t d = 0;
    double tol = 0.0;
    bool certified = false;     // false: uncertified regime
    bool degenerate = false;    // best configuration has collinear directions
    std::vector<std::string> notes;
};

namespace detail {

struct SimplexResult {
    Vec x;
    double f = 0.0;
    std::size_t evals = 0;
};

/// Nelder-Mead with dimension-adaptive coefficients. stop() is polled after
/// every evaluation.
template <class F, class Stop>
SimplexResult nelder_mead(F&& f, const Vec& x0, double step, std::size_t max_evals, Stop&& stop, double ftol = 1e-13) {
    const std::size_t n = x0.size();
    const double nd = static_cast<double>(n);
    const double alpha = 1.0, beta = 1.0 + 2.0 / nd, gamma = 0.75 - 0.5 / nd, delta = 1.0 - 1.0 / nd;

    std::vector<Vec> pts(n + 1, x0);
    Vec fv(n + 1);
    std::size_t evals = 0;
    auto eval = [&](const Vec& x) {
        ++evals;
        return f(x);
    };
    fv[0] = eval(pts[0]);
    for (std::size_t i = 0; i < n && !stop(); ++i) {
        pts[i + 1][i] += step;
        fv[i + 1] = eval(pts[i + 1]);
    }
    std::vector<std::size_t> idx(n + 1);
    Vec centroid(n), xr(n), xe(n), xc(n);
    auto point_along = [&](Vec& out, double coef, const Vec& worst) {
        for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + coef * (centroid[k] - worst[k]);
    };

    while (evals < max_evals && !stop()) {
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = idx.front(), worst = idx.back(), second = idx[n - 1];
        if (fv[worst] - fv[best] <= ftol) break;
        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k) diam = std::max(diam, std::abs(pts[i][k] - pts[best][k]));
        if (diam < 1e-12) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / nd;

        point_along(xr, alpha, pts[worst]);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            point_along(xe, alpha * beta, pts[worst]);
            const double fe = eval(xe);
            if (fe < fr) pts[worst] = xe, fv[worst] = fe;
            else pts[worst] = xr, fv[worst] = fr;
            continue;
        }
        if (fr < fv[second]) {
            pts[worst] = xr, fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        point_along(xc, outside ? alpha * gamma : -gamma, pts[worst]);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            pts[worst] = xc, fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n && !stop(); ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + delta * (pts[i][k] - pts[best][k]);
            fv[i] = eval(pts[i]);
        }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    return {pts[static_cast<std::size_t>(it - fv.begin())], *it, evals};
}

inline std::vector<Vec> split_directions(const Vec& x, std::size_t d) {
    std::vector<Vec> dirs;
    for (std::size_t i = 0; i + d <= x.size(); i += d) dirs.emplace_back(x.begin() + i, x.begin() + i + d);
    return dirs;
}

inline Vec unit_circle(double angle) { return {std::cos(angle), std::sin(angle)}; }

} // namespace detail

inline SolveReport solve_equipartition(const Measure& mu, unsigned l, unsigned m, const SolveOptions& opts = {}) {
    const std::size_t d = mu.dim();
    if (m < 2 || m > 6) throw Error(ErrorCode::InvalidOptions, "m must be in [2, 6]");
    if (l < 1) throw Error(ErrorCode::InvalidOptions, "l must be >= 1");
    if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidOptions, "tol must be positive");
    if (opts.max_restarts < 1) throw Error(ErrorCode::InvalidOptions, "need at least one restart");
    const double floor = 3.0 * mu.quantization_bound();
    if (opts.tol < floor)
        throw Error(ErrorCode::InvalidOptions, "tol " + std::to_string(opts.tol) +
                                                   " is below the point-cloud quantization floor 3*max_weight = " +
                                                   std::to_string(floor));

    SolveReport rep;
    rep.seed = opts.seed;
    rep.l = l;
    rep.m = m;
    rep.d = d;
    rep.tol = opts.tol;
    rep.certified = certify(m, l, static_cast<unsigned>(d)).verdict == Verdict::Certified;
    if (!rep.certified) rep.notes.push_back("uncertified regime: the algebraic criterion is inconclusive for this (m, l, d)");

    const std::size_t nparams = m * d;
    const std::size_t max_evals = opts.max_evals > 0 ? opts.max_evals : 400 * nparams;

    std::optional<Evaluation> best;
    std::optional<Evaluation> accepted;
    bool best_degenerate = false;

    auto consider = [&](Evaluation&& ev) {
        const bool degenerate = !collinearity_warnings(ev.config).empty();
        if (!accepted && !degenerate && ev.deviation.residual_max <= opts.tol) accepted = ev;
        if (!best || ev.deviation.residual_l2 < best->deviation.residual_l2) {
            best_degenerate = degenerate;
            best = std::move(ev);
        }
    };
    auto objective = [&](const Vec& x) {
        ++rep.evaluations;
        auto dirs = detail::split_directions(x, d);
        for (const auto& v : dirs)
            if (!(norm(v) > 1e-12)) return 1e6;
        Vec u = dirs.front();
        dirs.erase(dirs.begin());
        Evaluation ev = test_map(mu, u, dirs, l);
        const double f = ev.deviation.residual_l2;
        consider(std::move(ev));
        return f;
    };
    auto stop = [&] { return accepted.has_value(); };

    // Coarse angle seeds in the plane, best first. Residuals are invariant
    // under u -> -u and v_j -> -v_j, so angles in [0, pi) suffice.
    std::vector<Vec> seeds;
    if (d == 2 && opts.coarse_grid > 0) {
        const unsigned n = opts.coarse_grid;
        std::size_t total = 1;
        for (unsigned i = 0; i < m; ++i) total *= n;
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t code = 0; code < total && !stop(); ++code) {
            Vec x;
            std::vector<std::size_t> angles;
            std::size_t rest = code;
            for (unsigned i = 0; i < m; ++i) {
                angles.push_back(rest % n);
                rest /= n;
                const auto v = detail::unit_circle(std::numbers::pi * static_cast<double>(angles.back()) / n);
                x.insert(x.end(), v.begin(), v.end());
            }
            std::sort(angles.begin(), angles.end());
            if (std::adjacent_find(angles.begin(), angles.end()) != angles.end()) continue;
            scored.push_back({objective(x), seeds.size()});
            seeds.push_back(std::move(x));
        }
        std::stable_sort(scored.begin(), scored.end());
        std::vector<Vec> ordered;
        for (const auto& s : scored) ordered.push_back(seeds[s.second]);
        seeds = std::move(ordered);
    }

    for (unsigned r = 0; r < opts.max_restarts && !stop(); ++r) {
        rep.restarts_used = r + 1;
        Vec x0;
        if (r < seeds.size()) {
            x0 = seeds[r];
        } else {
            std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ULL + r);
            std::normal_distribution<double> gauss(0.0, 1.0);
            x0.resize(nparams);
            for (auto& v : x0) v = gauss(rng);
            for (std::size_t i = 0; i < m; ++i) {
                const Vec unit = normalized(std::span<const double>(x0).subspan(i * d, d));
                std::copy(unit.begin(), unit.end(), x0.begin() + static_cast<std::ptrdiff_t>(i * d));
            }
        }
        // Polish: restart the simplex around the incumbent with shrinking steps.
        double step = 0.25;
        double prev = std::numeric_limits<double>::infinity();
        for (int round = 0; round < 4 && !stop(); ++round) {
            auto res = detail::nelder_mead(objective, x0, step, max_evals, stop);
            x0 = res.x;
            for (std::size_t i = 0; i < m; ++i) {
                const Vec unit = normalized(std::span<const double>(x0).subspan(i * d, d));
                std::copy(unit.begin(), unit.end(), x0.begin() + static_cast<std::ptrdiff_t>(i * d));
            }
            if (!(res.f < prev * 0.999)) break;
            prev = res.f;
            step *= 0.3;
        }
    }

    const Evaluation& chosen = accepted ? *accepted : *best;
    rep.config = chosen.config;
    rep.residual_max = chosen.deviation.residual_max;
    rep.residual_l2 = chosen.deviation.residual_l2;
    rep.degenerate = accepted ? false : best_degenerate;
    if (accepted) {
        rep.status = SolveStatus::Converged;
    } else {
        rep.status = SolveStatus::NotConverged;
        if (rep.degenerate) rep.notes.push_back("best configuration is degenerate: directions are collinear");
        if (rep.certified) rep.notes.push_back(kSolverFailureNote);
    }
    return rep;
}

} // namespace equibox
