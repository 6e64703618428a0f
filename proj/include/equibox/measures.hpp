#pragma once

// Concrete mass distributions in R^d and the box masses a hyperplane
// arrangement cuts out of them.
//
// Two backends:
//  * weighted point clouds: piecewise-constant CDFs, quantile offsets at the
//    midpoint between consecutive projected values, per-slab error bounded by
//    the largest point weight;
//  * grids of piecewise-constant density. For d <= 2 cells are clipped
//    exactly against the hyperplanes, which keeps the CDF continuous. For
//    d >= 3 each cell is lumped into 2^d subcell centres and evaluated as a
//    point cloud.
//
// Points on a hyperplane go to its lower / 0 side.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "equibox/box_index.hpp"
#include "equibox/error.hpp"

namespace equibox {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vec normalized(std::span<const double> a) {
    const double n = norm(a);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::DegenerateDirection, "zero or non-finite direction vector");
    Vec out(a.begin(), a.end());
    for (auto& x : out) x /= n;
    return out;
}

struct PointCloud {
    std::size_t dim = 0;
    Vec coords;  // row-major, size() * dim
    Vec weights; // sums to 1

    std::size_t size() const { return weights.size(); }
    std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
    double max_weight() const { return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end()); }
};

struct Grid {
    std::size_t dim = 0;
    Vec origin;  // lower corner of cell (0, ..., 0)
    Vec spacing;
    std::vector<std::size_t> shape;
    Vec mass;    // per-cell mass, row-major with the last axis fastest, sums to 1

    std::size_t cell_count() const { return mass.size(); }

    Vec center(std::size_t cell) const {
        Vec c(dim);
        for (std::size_t k = dim; k-- > 0;) {
            const std::size_t i = cell % shape[k];
            cell /= shape[k];
            c[k] = origin[k] + (static_cast<double>(i) + 0.5) * spacing[k];
        }
        return c;
    }
};

enum class MeasureKind { PointCloud, Grid };

class Measure {
public:
    /// Validates and normalizes. weights may be empty for unit weights.
    static Measure point_cloud(std::size_t dim, Vec coords, Vec weights = {}) {
        if (dim == 0) throw Error(ErrorCode::InvalidMeasure, "dimension must be >= 1");
        if (coords.size() % dim != 0) throw Error(ErrorCode::DimensionMismatch, "coordinate count not a multiple of dim");
        const std::size_t n = coords.size() / dim;
        if (n == 0) throw Error(ErrorCode::InvalidMeasure, "point cloud is empty");
        if (weights.empty()) weights.assign(n, 1.0);
        if (weights.size() != n) throw Error(ErrorCode::DimensionMismatch, "weight count differs from point count");
        for (double c : coords)
            if (!std::isfinite(c)) throw Error(ErrorCode::InvalidMeasure, "non-finite coordinate");
        normalize(weights, "weight");
        Measure out;
        out.data_ = PointCloud{dim, std::move(coords), std::move(weights)};
        return out;
    }

    static Measure grid(std::size_t dim, Vec origin, Vec spacing, std::vector<std::size_t> shape, Vec density) {
        if (dim == 0) throw Error(ErrorCode::InvalidMeasure, "dimension must be >= 1");
        if (origin.size() != dim || spacing.size() != dim || shape.size() != dim)
            throw Error(ErrorCode::DimensionMismatch, "origin/spacing/shape length differs from dim");
        std::size_t cells = 1;
        for (std::size_t k = 0; k < dim; ++k) {
            if (shape[k] < 2) throw Error(ErrorCode::InvalidMeasure, "grid needs at least 2 cells per axis");
            if (!(spacing[k] > 0.0) || !std::isfinite(spacing[k])) throw Error(ErrorCode::InvalidMeasure, "spacing must be positive");
            if (!std::isfinite(origin[k])) throw Error(ErrorCode::InvalidMeasure, "non-finite origin");
            cells *= shape[k];
        }
        if (density.size() != cells) throw Error(ErrorCode::DimensionMismatch, "grid data size differs from product of shape");
        normalize(density, "density");
        Measure out;
        out.data_ = Grid{dim, std::move(origin), std::move(spacing), std::move(shape), std::move(density)};
        out.prepare_grid();
        return out;
    }

    MeasureKind kind() const { return std::holds_alternative<PointCloud>(data_) ? MeasureKind::PointCloud : MeasureKind::Grid; }
    std::size_t dim() const { return std::visit([](const auto& x) { return x.dim; }, data_); }

    const PointCloud* cloud() const { return std::get_if<PointCloud>(&data_); }
    const Grid* grid() const { return std::get_if<Grid>(&data_); }

    /// True when grid cells are clipped exactly (d <= 2).
    bool exact_grid() const { return grid() != nullptr && dim() <= 2; }

    /// The point set used for evaluation: the cloud itself, or the lumped
    /// subcell centres of a d >= 3 grid. Null for exact grids.
    const PointCloud* evaluation_cloud() const {
        if (auto pc = cloud()) return pc;
        return lumped_.get();
    }

    /// Largest single atom of the evaluation backend (0 for exact grids).
    /// Slab and box masses can miss their target by up to this much.
    double quantization_bound() const {
        if (auto pc = evaluation_cloud()) return pc->max_weight();
        return 0.0;
    }

    /// Cell centres, row-major; only for exact grids.
    const Vec& grid_centers() const { return centers_; }

private:
    static void normalize(Vec& w, const char* what) {
        double total = 0.0;
        for (double x : w) {
            if (!std::isfinite(x)) throw Error(ErrorCode::InvalidMeasure, std::string("non-finite ") + what);
            if (x < 0.0) throw Error(ErrorCode::InvalidMeasure, std::string("negative ") + what);
            total += x;
        }
        if (!(total > 0.0)) throw Error(ErrorCode::InvalidMeasure, "total mass must be positive");
        for (auto& x : w) x /= total;
    }

    void prepare_grid() {
        const Grid& g = std::get<Grid>(data_);
        if (g.dim <= 2) {
            centers_.reserve(g.cell_count() * g.dim);
            for (std::size_t c = 0; c < g.cell_count(); ++c) {
                const Vec ctr = g.center(c);
                centers_.insert(centers_.end(), ctr.begin(), ctr.end());
            }
            return;
        }
        auto lumped = std::make_shared<PointCloud>();
        lumped->dim = g.dim;
        const std::size_t sub = std::size_t{1} << g.dim;
        lumped->coords.reserve(g.cell_count() * sub * g.dim);
        lumped->weights.reserve(g.cell_count() * sub);
        for (std::size_t c = 0; c < g.cell_count(); ++c) {
            const Vec ctr = g.center(c);
            for (std::size_t s = 0; s < sub; ++s) {
                for (std::size_t k = 0; k < g.dim; ++k)
                    lumped->coords.push_back(ctr[k] + ((s >> k) & 1u ? 0.25 : -0.25) * g.spacing[k]);
                lumped->weights.push_back(g.mass[c] / static_cast<double>(sub));
            }
        }
        lumped_ = std::move(lumped);
    }

    std::variant<PointCloud, Grid> data_;
    std::shared_ptr<const PointCloud> lumped_;
    Vec centers_;
};

/// Directions plus offsets of one candidate arrangement.
struct Configuration {
    Vec u;                     // parallel-family normal
    std::vector<Vec> extra_dirs;
    Vec parallel_offsets;      // nondecreasing, l entries
    Vec extra_offsets;         // one per extra direction

    unsigned m() const { return static_cast<unsigned>(extra_dirs.size() + 1); }
    unsigned l() const { return static_cast<unsigned>(parallel_offsets.size()); }
};

/// (l+1) x 2^(m-1) box masses, flat in box_offset order.
struct BoxMassTensor {
    unsigned l = 0;
    unsigned m = 0;
    Vec masses;

    double at(BoxIndex b) const { return masses[box_offset(b, m)]; }
    double total() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }
    double slab_mass(unsigned s) const {
        double t = 0.0;
        for (std::uint32_t bits = 0; bits < (1u << (m - 1)); ++bits) t += at({s, bits});
        return t;
    }
};

namespace detail {

struct HalfPlane {
    double a0;
    double a1;
    double b; // a . y <= b
};

/// Fraction of the centred box [-h/2, h/2]^dim (dim 1 or 2) satisfying all
/// half-space constraints.
inline double clipped_fraction(std::size_t dim, const double* h, std::span<const HalfPlane> cuts) {
    if (dim == 1) {
        double lo = -0.5 * h[0], hi = 0.5 * h[0];
        for (const auto& c : cuts) {
            if (c.a0 > 0.0) hi = std::min(hi, c.b / c.a0);
            else if (c.a0 < 0.0) lo = std::max(lo, c.b / c.a0);
            else if (c.b < 0.0) return 0.0;
        }
        return hi > lo ? (hi - lo) / h[0] : 0.0;
    }
    struct Pt { double x, y; };
    std::array<Pt, 16> buf_a{}, buf_b{};
    std::size_t n = 4;
    const double hx = 0.5 * h[0], hy = 0.5 * h[1];
    buf_a[0] = {-hx, -hy};
    buf_a[1] = {hx, -hy};
    buf_a[2] = {hx, hy};
    buf_a[3] = {-hx, hy};
    Pt* cur = buf_a.data();
    Pt* nxt = buf_b.data();
    for (const auto& c : cuts) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const Pt p = cur[i], q = cur[(i + 1) % n];
            const double fp = c.a0 * p.x + c.a1 * p.y - c.b;
            const double fq = c.a0 * q.x + c.a1 * q.y - c.b;
            if (fp <= 0.0) nxt[k++] = p;
            if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
                const double t = fp / (fp - fq);
                nxt[k++] = {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
            }
        }
        n = k;
        std::swap(cur, nxt);
        if (n < 3) return 0.0;
    }
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Pt p = cur[i], q = cur[(i + 1) % n];
        area2 += p.x * q.y - q.x * p.y;
    }
    return std::clamp(0.5 * std::abs(area2) / (h[0] * h[1]), 0.0, 1.0);
}

inline HalfPlane below(std::span<const double> dir, double bound) {
    return {dir[0], dir.size() > 1 ? dir[1] : 0.0, bound};
}

inline HalfPlane above(std::span<const double> dir, double bound) {
    return {-dir[0], dir.size() > 1 ? -dir[1] : 0.0, -bound};
}

/// Half-width of a cell's projection onto dir.
inline double projection_radius(const Grid& g, std::span<const double> dir) {
    double r = 0.0;
    for (std::size_t k = 0; k < g.dim; ++k) r += 0.5 * std::abs(dir[k]) * g.spacing[k];
    return r;
}

inline std::size_t slab_of(std::span<const double> offsets, double x) {
    return static_cast<std::size_t>(std::lower_bound(offsets.begin(), offsets.end(), x) - offsets.begin());
}

// ---- point cloud backend ------------------------------------------------

inline Vec cloud_quantiles(const PointCloud& pc, std::span<const double> dir, unsigned count) {
    const std::size_t n = pc.size();
    std::vector<std::pair<double, double>> proj(n);
    for (std::size_t i = 0; i < n; ++i) proj[i] = {dot(pc.point(i), dir), pc.weights[i]};
    std::sort(proj.begin(), proj.end());

    // Distinct projected values and cumulative mass after each.
    std::vector<double> values;
    std::vector<double> cum;
    values.reserve(n);
    cum.reserve(n);
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += proj[i].second;
        if (!values.empty() && proj[i].first == values.back()) cum.back() = running;
        else {
            values.push_back(proj[i].first);
            cum.push_back(running);
        }
    }
    const std::size_t groups = values.size();
    const double spread = std::max(1.0, values.back() - values.front());
    auto cut_mass = [&](std::size_t b) { return b == 0 ? 0.0 : cum[b - 1]; };
    auto cut_offset = [&](std::size_t b) {
        if (b == 0) return values.front() - spread;
        if (b == groups) return values.back() + spread;
        return 0.5 * (values[b - 1] + values[b]);
    };

    Vec out;
    out.reserve(count);
    std::size_t b = 0;
    constexpr double kEps = 1e-12;
    for (unsigned i = 1; i <= count; ++i) {
        const double q = static_cast<double>(i) / static_cast<double>(count + 1);
        while (b < groups && cut_mass(b) < q - kEps) ++b;
        std::size_t best = b;
        if (b > 0 && std::abs(cut_mass(b) - q) > kEps && q - cut_mass(b - 1) < cut_mass(b) - q) best = b - 1;
        out.push_back(cut_offset(best));
    }
    return out;
}

inline BoxMassTensor cloud_box_masses(const PointCloud& pc, const Configuration& cfg) {
    const unsigned m = cfg.m();
    BoxMassTensor t{cfg.l(), m, Vec(static_cast<std::size_t>(cfg.l() + 1) << (m - 1), 0.0)};
    for (std::size_t i = 0; i < pc.size(); ++i) {
        const auto p = pc.point(i);
        const auto slab = slab_of(cfg.parallel_offsets, dot(p, cfg.u));
        std::uint32_t bits = 0;
        for (unsigned j = 0; j + 1 < m; ++j)
            if (dot(p, cfg.extra_dirs[j]) > cfg.extra_offsets[j]) bits |= 1u << j;
        t.masses[box_offset({static_cast<unsigned>(slab), bits}, m)] += pc.weights[i];
    }
    return t;
}

// ---- exact planar grid backend -------------------------------------------

/// Sorted cell projections onto one direction with prefix masses, enough to
/// evaluate the exact CDF of the piecewise-constant density.
class GridProjection {
public:
    GridProjection(const Measure& mu, std::span<const double> dir)
        : grid_(*mu.grid()), dir_(dir.begin(), dir.end()), radius_(projection_radius(grid_, dir)) {
        const auto& centers = mu.grid_centers();
        const std::size_t n = grid_.cell_count();
        order_.resize(n);
        for (std::size_t c = 0; c < n; ++c) order_[c] = {dot({centers.data() + c * grid_.dim, grid_.dim}, dir_), c};
        std::sort(order_.begin(), order_.end());
        prefix_.resize(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) prefix_[i + 1] = prefix_[i] + grid_.mass[order_[i].second];
    }

    /// Mass of { p : <p, dir> <= t }.
    double cdf(double t) const {
        const auto lo = std::upper_bound(order_.begin(), order_.end(), std::make_pair(t - radius_, kMaxIndex));
        const auto hi = std::lower_bound(lo, order_.end(), std::make_pair(t + radius_, std::size_t{0}));
        double s = prefix_[static_cast<std::size_t>(lo - order_.begin())];
        for (auto it = lo; it != hi; ++it) {
            const HalfPlane cut = below(dir_, t - it->first);
            s += grid_.mass[it->second] * clipped_fraction(grid_.dim, grid_.spacing.data(), {&cut, 1});
        }
        return s;
    }

    double lower() const { return order_.front().first - radius_; }
    double upper() const { return order_.back().first + radius_; }

    /// Offset t with cdf(t) = q, by bisection to |error| <= tol.
    double quantile(double q, double tol = 1e-13) const {
        double lo = lower(), hi = upper();
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (lo + hi);
            const double f = cdf(mid);
            if (std::abs(f - q) <= tol) break;
            if (f < q) lo = mid;
            else hi = mid;
            if (hi - lo <= 1e-15 * (1.0 + std::abs(mid))) break;
        }
        return mid;
    }

private:
    static constexpr std::size_t kMaxIndex = static_cast<std::size_t>(-1);
    const Grid& grid_;
    Vec dir_;
    double radius_;
    std::vector<std::pair<double, std::size_t>> order_;
    Vec prefix_;
};

inline BoxMassTensor grid_box_masses(const Measure& mu, const Configuration& cfg) {
    const Grid& g = *mu.grid();
    const auto& centers = mu.grid_centers();
    const unsigned m = cfg.m();
    const unsigned l = cfg.l();
    const std::size_t extras = m - 1;
    BoxMassTensor t{l, m, Vec(static_cast<std::size_t>(l + 1) << extras, 0.0)};

    const double ru = projection_radius(g, cfg.u);
    Vec rv(extras);
    for (std::size_t j = 0; j < extras; ++j) rv[j] = projection_radius(g, cfg.extra_dirs[j]);
    const auto& offs = cfg.parallel_offsets;

    std::vector<HalfPlane> cuts;
    std::vector<std::size_t> crossing;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const double mass = g.mass[c];
        if (mass == 0.0) continue;
        const std::span<const double> ctr(centers.data() + c * g.dim, g.dim);
        const double pu = dot(ctr, cfg.u);
        const std::size_t s_lo = slab_of(offs, pu - ru);
        const std::size_t s_hi = slab_of(offs, pu + ru);
        std::uint32_t fixed_bits = 0;
        crossing.clear();
        Vec pv(extras);
        for (std::size_t j = 0; j < extras; ++j) {
            pv[j] = dot(ctr, cfg.extra_dirs[j]);
            const double e = cfg.extra_offsets[j];
            if (pv[j] - rv[j] > e) fixed_bits |= 1u << j;
            else if (pv[j] + rv[j] > e) crossing.push_back(j);
        }
        if (s_lo == s_hi && crossing.empty()) {
            t.masses[box_offset({static_cast<unsigned>(s_lo), fixed_bits}, m)] += mass;
            continue;
        }
        for (std::size_t s = s_lo; s <= s_hi; ++s) {
            for (std::uint32_t combo = 0; combo < (1u << crossing.size()); ++combo) {
                cuts.clear();
                if (s > 0) cuts.push_back(above(cfg.u, offs[s - 1] - pu));
                if (s < l) cuts.push_back(below(cfg.u, offs[s] - pu));
                std::uint32_t bits = fixed_bits;
                for (std::size_t k = 0; k < crossing.size(); ++k) {
                    const std::size_t j = crossing[k];
                    const double e = cfg.extra_offsets[j] - pv[j];
                    if (combo & (1u << k)) {
                        bits |= 1u << j;
                        cuts.push_back(above(cfg.extra_dirs[j], e));
                    } else {
                        cuts.push_back(below(cfg.extra_dirs[j], e));
                    }
                }
                const double f = clipped_fraction(g.dim, g.spacing.data(), cuts);
                if (f > 0.0) t.masses[box_offset({static_cast<unsigned>(s), bits}, m)] += mass * f;
            }
        }
    }
    return t;
}

} // namespace detail

/// l offsets along dir cutting the measure into l+1 slabs of equal mass.
inline Vec direction_quantiles(const Measure& mu, std::span<const double> dir, unsigned l) {
    if (dir.size() != mu.dim()) throw Error(ErrorCode::DimensionMismatch, "direction length differs from measure dimension");
    if (l < 1) throw Error(ErrorCode::InvalidOptions, "need at least one quantile");
    if (!(norm(dir) > 0.0)) throw Error(ErrorCode::DegenerateDirection, "zero direction vector");
    if (auto pc = mu.evaluation_cloud()) return detail::cloud_quantiles(*pc, dir, l);
    const detail::GridProjection proj(mu, dir);
    Vec out;
    for (unsigned i = 1; i <= l; ++i) out.push_back(proj.quantile(static_cast<double>(i) / (l + 1)));
    return out;
}

inline double direction_median(const Measure& mu, std::span<const double> dir) {
    return direction_quantiles(mu, dir, 1).front();
}

/// Mass of { p : <p, dir> <= t } under the evaluation backend.
inline double halfspace_mass(const Measure& mu, std::span<const double> dir, double t) {
    if (auto pc = mu.evaluation_cloud()) {
        double s = 0.0;
        for (std::size_t i = 0; i < pc->size(); ++i)
            if (dot(pc->point(i), dir) <= t) s += pc->weights[i];
        return s;
    }
    return detail::GridProjection(mu, dir).cdf(t);
}

inline void validate_configuration(const Measure& mu, const Configuration& cfg) {
    const std::size_t d = mu.dim();
    if (cfg.u.size() != d) throw Error(ErrorCode::DimensionMismatch, "u has wrong dimension");
    for (const auto& v : cfg.extra_dirs)
        if (v.size() != d) throw Error(ErrorCode::DimensionMismatch, "extra direction has wrong dimension");
    if (cfg.parallel_offsets.empty()) throw Error(ErrorCode::UnpopulatedOffsets, "no parallel offsets");
    if (cfg.extra_offsets.size() != cfg.extra_dirs.size())
        throw Error(ErrorCode::UnpopulatedOffsets, "extra offsets missing");
    if (!std::is_sorted(cfg.parallel_offsets.begin(), cfg.parallel_offsets.end()))
        throw Error(ErrorCode::InvalidOptions, "parallel offsets must be nondecreasing");
    if (cfg.extra_dirs.size() > 20) throw Error(ErrorCode::ResourceGuard, "too many extra directions");
}

inline BoxMassTensor box_mass_tensor(const Measure& mu, const Configuration& cfg) {
    validate_configuration(mu, cfg);
    if (auto pc = mu.evaluation_cloud()) return detail::cloud_box_masses(*pc, cfg);
    return detail::grid_box_masses(mu, cfg);
}

/// Directions normalized and offsets filled in from quantiles and medians.
inline Configuration complete_configuration(const Measure& mu, std::span<const double> u,
                                            const std::vector<Vec>& extra_dirs, unsigned l) {
    Configuration cfg;
    cfg.u = normalized(u);
    for (const auto& v : extra_dirs) cfg.extra_dirs.push_back(normalized(v));
    cfg.parallel_offsets = direction_quantiles(mu, cfg.u, l);
    for (const auto& v : cfg.extra_dirs) cfg.extra_offsets.push_back(direction_median(mu, v));
    return cfg;
}

// ---- file formats ---------------------------------------------------------

enum class MeasureFormat { Auto, Csv, Json };

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

} // namespace detail

/// Point-cloud CSV: optional header "x1,...,xd,w", then d coordinates and a weight per row.
inline Measure parse_point_cloud_csv(std::istream& in) {
    std::string line;
    std::size_t cols = 0;
    std::size_t lineno = 0;
    Vec coords, weights;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = detail::split_csv(line);
        std::vector<double> vals(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && detail::parse_double(fields[i], vals[i]);
        if (cols == 0) {
            cols = fields.size();
            if (cols < 2) throw Error(ErrorCode::Parse, "CSV needs at least one coordinate and a weight column");
            if (!numeric) continue; // header
        }
        if (fields.size() != cols)
            throw Error(ErrorCode::DimensionMismatch, "CSV line " + std::to_string(lineno) + " has " +
                                                          std::to_string(fields.size()) + " fields, expected " + std::to_string(cols));
        if (!numeric) throw Error(ErrorCode::Parse, "CSV line " + std::to_string(lineno) + " is not numeric");
        if (vals.back() < 0.0) throw Error(ErrorCode::InvalidMeasure, "negative weight on CSV line " + std::to_string(lineno));
        coords.insert(coords.end(), vals.begin(), vals.end() - 1);
        weights.push_back(vals.back());
    }
    if (cols == 0 || weights.empty()) throw Error(ErrorCode::Parse, "CSV contains no points");
    return Measure::point_cloud(cols - 1, std::move(coords), std::move(weights));
}

/// Grid JSON: {"dim", "origin", "spacing", "shape", "data"} with data row-major.
inline Measure parse_grid_json(const nlohmann::json& j) {
    try {
        const auto dim = j.at("dim").get<std::size_t>();
        return Measure::grid(dim, j.at("origin").get<Vec>(), j.at("spacing").get<Vec>(),
                             j.at("shape").get<std::vector<std::size_t>>(), j.at("data").get<Vec>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("grid JSON: ") + e.what());
    }
}

inline Measure load_measure(const std::string& path, MeasureFormat format = MeasureFormat::Auto) {
    if (format == MeasureFormat::Auto) {
        const auto dot_pos = path.rfind('.');
        const std::string ext = dot_pos == std::string::npos ? "" : path.substr(dot_pos + 1);
        if (ext == "csv") format = MeasureFormat::Csv;
        else if (ext == "json") format = MeasureFormat::Json;
        else throw Error(ErrorCode::Parse, "cannot infer measure format from '" + path + "'");
    }
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
    if (format == MeasureFormat::Csv) return parse_point_cloud_csv(in);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("invalid JSON: ") + e.what());
    }
    return parse_grid_json(j);
}

inline void write_point_cloud_csv(std::ostream& out, const PointCloud& pc) {
    for (std::size_t k = 0; k < pc.dim; ++k) out << 'x' << k + 1 << ',';
    out << "w\n";
    char buf[32];
    for (std::size_t i = 0; i < pc.size(); ++i) {
        for (double x : pc.point(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", pc.weights[i]);
        out << buf << '\n';
    }
}

inline nlohmann::json grid_to_json(const Grid& g) {
    return {{"dim", g.dim}, {"origin", g.origin}, {"spacing", g.spacing}, {"shape", g.shape}, {"data", g.mass}};
}

} // namespace equibox
