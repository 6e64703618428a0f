#pragma once

// Seeded Gaussian-mixture measures for experiments and tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "equibox/error.hpp"
#include "equibox/measures.hpp"

namespace equibox {

/// Axis-aligned Gaussian mixture.
struct GaussianMixture {
    std::size_t dim = 0;
    std::vector<Vec> means;
    std::vector<Vec> sigmas;
    Vec weights; // sums to 1

    double pdf(std::span<const double> x) const {
        double total = 0.0;
        for (std::size_t c = 0; c < means.size(); ++c) {
            double expo = 0.0, scale = weights[c];
            for (std::size_t k = 0; k < dim; ++k) {
                const double z = (x[k] - means[c][k]) / sigmas[c][k];
                expo += z * z;
                scale /= sigmas[c][k] * std::sqrt(2.0 * std::numbers::pi);
            }
            total += scale * std::exp(-0.5 * expo);
        }
        return total;
    }
};

inline GaussianMixture isotropic_gaussian(std::size_t dim, double sigma = 1.0) {
    return {dim, {Vec(dim, 0.0)}, {Vec(dim, sigma)}, {1.0}};
}

/// Means uniform in [-3, 3]^d, per-axis sigmas in [0.4, 1.2], weights in [0.5, 1.5] before normalization.
inline GaussianMixture random_mixture(std::size_t dim, std::size_t components, std::uint64_t seed) {
    if (dim == 0 || components == 0) throw Error(ErrorCode::InvalidOptions, "mixture needs dim >= 1 and components >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mean_dist(-3.0, 3.0), sigma_dist(0.4, 1.2), weight_dist(0.5, 1.5);
    GaussianMixture mix{dim, {}, {}, {}};
    double total = 0.0;
    for (std::size_t c = 0; c < components; ++c) {
        Vec mu(dim), sd(dim);
        for (auto& x : mu) x = mean_dist(rng);
        for (auto& x : sd) x = sigma_dist(rng);
        mix.means.push_back(std::move(mu));
        mix.sigmas.push_back(std::move(sd));
        mix.weights.push_back(weight_dist(rng));
        total += mix.weights.back();
    }
    for (auto& w : mix.weights) w /= total;
    return mix;
}

/// n unit-weight samples.
inline Measure sample_point_cloud(const GaussianMixture& mix, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorCode::InvalidOptions, "need at least one sample");
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
    std::discrete_distribution<std::size_t> pick(mix.weights.begin(), mix.weights.end());
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec coords;
    coords.reserve(n * mix.dim);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = pick(rng);
        for (std::size_t k = 0; k < mix.dim; ++k) coords.push_back(mix.means[c][k] + mix.sigmas[c][k] * gauss(rng));
    }
    return Measure::point_cloud(mix.dim, std::move(coords));
}

/// Density sampled at cell centres on a cube covering every component to 5 sigma.
inline Measure rasterize_grid(const GaussianMixture& mix, std::size_t cells_per_axis) {
    if (cells_per_axis < 2) throw Error(ErrorCode::InvalidOptions, "grid needs at least 2 cells per axis");
    Vec lo(mix.dim, 1e300), hi(mix.dim, -1e300);
    for (std::size_t c = 0; c < mix.means.size(); ++c)
        for (std::size_t k = 0; k < mix.dim; ++k) {
            lo[k] = std::min(lo[k], mix.means[c][k] - 5.0 * mix.sigmas[c][k]);
            hi[k] = std::max(hi[k], mix.means[c][k] + 5.0 * mix.sigmas[c][k]);
        }
    Vec spacing(mix.dim);
    std::size_t cells = 1;
    for (std::size_t k = 0; k < mix.dim; ++k) {
        spacing[k] = (hi[k] - lo[k]) / static_cast<double>(cells_per_axis);
        cells *= cells_per_axis;
    }
    Vec density(cells);
    Vec x(mix.dim);
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rest = c;
        for (std::size_t k = mix.dim; k-- > 0;) {
            x[k] = lo[k] + (static_cast<double>(rest % cells_per_axis) + 0.5) * spacing[k];
            rest /= cells_per_axis;
        }
        density[c] = mix.pdf(x);
    }
    return Measure::grid(mix.dim, lo, spacing, std::vector<std::size_t>(mix.dim, cells_per_axis), std::move(density));
}

/// Symmetric window [-half_width, half_width]^d version, used for centred test measures.
inline Measure rasterize_grid(const GaussianMixture& mix, std::size_t cells_per_axis, double half_width) {
    const double h = 2.0 * half_width / static_cast<double>(cells_per_axis);
    std::size_t cells = 1;
    for (std::size_t k = 0; k < mix.dim; ++k) cells *= cells_per_axis;
    Vec density(cells), x(mix.dim);
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rest = c;
        for (std::size_t k = mix.dim; k-- > 0;) {
            x[k] = -half_width + (static_cast<double>(rest % cells_per_axis) + 0.5) * h;
            rest /= cells_per_axis;
        }
        density[c] = mix.pdf(x);
    }
    return Measure::grid(mix.dim, Vec(mix.dim, -half_width), Vec(mix.dim, h),
                         std::vector<std::size_t>(mix.dim, cells_per_axis), std::move(density));
}

} // namespace equibox
