#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "equibox/generate.hpp"
#include "equibox/measures.hpp"

using namespace equibox;
using Catch::Approx;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / ("equibox_test_" + name);
    std::ofstream(path) << contents;
    return path;
}

Vec random_unit(std::mt19937_64& rng, std::size_t d) {
    std::normal_distribution<double> g;
    Vec v(d);
    for (auto& x : v) x = g(rng);
    return normalized(v);
}

Measure random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> w(0.5, 2.0);
    Vec coords(n * d), weights(n);
    for (auto& x : coords) x = g(rng);
    for (auto& x : weights) x = w(rng);
    return Measure::point_cloud(d, std::move(coords), std::move(weights));
}

Configuration random_config(std::mt19937_64& rng, std::size_t d, unsigned l, unsigned m) {
    std::normal_distribution<double> g;
    Configuration c;
    c.u = random_unit(rng, d);
    for (unsigned j = 0; j + 1 < m; ++j) {
        c.extra_dirs.push_back(random_unit(rng, d));
        c.extra_offsets.push_back(0.5 * g(rng));
    }
    for (unsigned i = 0; i < l; ++i) c.parallel_offsets.push_back(g(rng));
    std::sort(c.parallel_offsets.begin(), c.parallel_offsets.end());
    return c;
}

// Per-point scan with no binary search and no shared helpers.
BoxMassTensor scan_oracle(const PointCloud& pc, const Configuration& c) {
    const unsigned m = c.m(), l = c.l();
    BoxMassTensor t{l, m, Vec(static_cast<std::size_t>(l + 1) << (m - 1), 0.0)};
    for (std::size_t i = 0; i < pc.size(); ++i) {
        double pu = 0.0;
        for (std::size_t k = 0; k < pc.dim; ++k) pu += pc.coords[i * pc.dim + k] * c.u[k];
        unsigned slab = 0;
        for (double t_off : c.parallel_offsets)
            if (t_off < pu) ++slab;
        unsigned bits = 0;
        for (unsigned j = 0; j + 1 < m; ++j) {
            double pv = 0.0;
            for (std::size_t k = 0; k < pc.dim; ++k) pv += pc.coords[i * pc.dim + k] * c.extra_dirs[j][k];
            if (pv > c.extra_offsets[j]) bits |= 1u << j;
        }
        t.masses[(static_cast<std::size_t>(slab) << (m - 1)) | bits] += pc.weights[i];
    }
    return t;
}

Measure centred_gaussian_grid(std::size_t cells) {
    return rasterize_grid(isotropic_gaussian(2), cells, 6.0);
}

} // namespace

TEST_CASE("CSV loader normalizes weights") {
    const auto path = temp_file("three.csv", "x1,x2,w\n0,0,1\n1,0,1\n0,1,1\n");
    const auto mu = load_measure(path.string());
    REQUIRE(mu.kind() == MeasureKind::PointCloud);
    CHECK(mu.dim() == 2);
    for (double w : mu.cloud()->weights) CHECK(w == Approx(1.0 / 3.0).epsilon(1e-15));
    std::filesystem::remove(path);
}

TEST_CASE("CSV header is optional and bad rows are rejected") {
    std::istringstream no_header("1,2,1\n3,4,3\n");
    const auto mu = parse_point_cloud_csv(no_header);
    CHECK(mu.cloud()->weights[1] == Approx(0.75));

    std::istringstream negative("x1,w\n1,1\n2,-1\n");
    try {
        (void)parse_point_cloud_csv(negative);
        FAIL("expected InvalidMeasure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidMeasure);
    }
    std::istringstream ragged("1,2,1\n3,1\n");
    CHECK_THROWS_AS(parse_point_cloud_csv(ragged), Error);
    std::istringstream zero("1,0\n2,0\n");
    CHECK_THROWS_AS(parse_point_cloud_csv(zero), Error);
}

TEST_CASE("grid JSON loader") {
    const auto path = temp_file("grid.json", R"({"dim":2,"origin":[0,0],"spacing":[0.5,0.5],"shape":[2,2],"data":[3,3,3,3]})");
    const auto mu = load_measure(path.string());
    REQUIRE(mu.kind() == MeasureKind::Grid);
    for (double m : mu.grid()->mass) CHECK(m == 0.25);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(parse_grid_json(nlohmann::json::parse(R"({"dim":2,"origin":[0,0],"spacing":[1,1],"shape":[2,2],"data":[1,1,1]})")), Error);
    CHECK_THROWS_AS(load_measure("measure.txt"), Error);
    CHECK_THROWS_AS(load_measure("/nonexistent/equibox.csv"), Error);
}

TEST_CASE("grid round trip through JSON") {
    const auto mu = centred_gaussian_grid(16);
    const auto back = parse_grid_json(grid_to_json(*mu.grid()));
    REQUIRE(back.grid()->mass.size() == mu.grid()->mass.size());
    for (std::size_t i = 0; i < mu.grid()->mass.size(); ++i)
        REQUIRE(back.grid()->mass[i] == Approx(mu.grid()->mass[i]).epsilon(1e-14));
}

TEST_CASE("uniform unit square quantiles") {
    const auto mu = Measure::grid(2, {0, 0}, {0.5, 0.5}, {2, 2}, {1, 1, 1, 1});
    const Vec u{1, 0};
    const auto q = direction_quantiles(mu, u, 2);
    REQUIRE(q.size() == 2);
    CHECK(q[0] == Approx(1.0 / 3.0).margin(1e-10));
    CHECK(q[1] == Approx(2.0 / 3.0).margin(1e-10));
    CHECK(halfspace_mass(mu, u, q[0]) == Approx(1.0 / 3.0).margin(1e-10));
}

TEST_CASE("one-dimensional Gaussian median") {
    const auto mu = rasterize_grid(isotropic_gaussian(1), 1200, 6.0);
    const Vec u{1};
    CHECK(direction_median(mu, u) == Approx(0.0).margin(1e-6));
    const auto q = direction_quantiles(mu, u, 3);
    CHECK(q[0] == Approx(-q[2]).margin(1e-6));
}

TEST_CASE("six collinear points split 2/2/2") {
    Vec coords;
    for (int i = 1; i <= 6; ++i) coords.insert(coords.end(), {static_cast<double>(i), 0.0});
    const auto mu = Measure::point_cloud(2, coords);
    const Vec u{1, 0};
    const auto q = direction_quantiles(mu, u, 2);

    // every pair of split positions t1 <= t2 on a half-integer lattice; keep those giving 2/2/2.
    // Ties go to the lower slab, so the feasible intervals are [2, 3) and [4, 5).
    std::vector<std::pair<double, double>> ok;
    for (int a = 0; a <= 14; ++a)
        for (int b = a; b <= 14; ++b) {
            const double t1 = 0.5 * a, t2 = 0.5 * b;
            int c0 = 0, c1 = 0, c2 = 0;
            for (int i = 1; i <= 6; ++i) (i <= t1 ? c0 : i <= t2 ? c1 : c2)++;
            if (c0 == 2 && c1 == 2 && c2 == 2) ok.push_back({t1, t2});
        }
    for (auto [t1, t2] : ok) {
        CHECK(t1 >= 2.0);
        CHECK(t1 < 3.0);
        CHECK(t2 >= 4.0);
        CHECK(t2 < 5.0);
    }
    CHECK(ok.size() == 4);
    CHECK(q[0] > 2.0);
    CHECK(q[0] <= 3.0);
    CHECK(q[1] > 4.0);
    CHECK(q[1] <= 5.0);

    Configuration cfg{{1, 0}, {{0, 1}}, q, {0.0}};
    const auto t = box_mass_tensor(mu, cfg);
    for (unsigned s = 0; s < 3; ++s) CHECK(t.slab_mass(s) == Approx(1.0 / 3.0));
    // points on the extra line go to the 0 side
    for (unsigned s = 0; s < 3; ++s) CHECK(t.at({s, 1}) == 0.0);
}

TEST_CASE("centred Gaussian grid splits into six equal boxes") {
    const auto mu = centred_gaussian_grid(256);
    const auto cfg = complete_configuration(mu, Vec{1, 0}, {Vec{0, 1}}, 2);
    const auto t = box_mass_tensor(mu, cfg);
    REQUIRE(t.masses.size() == 6);
    for (double x : t.masses) CHECK(x == Approx(1.0 / 6.0).margin(1e-4));
    CHECK(t.total() == Approx(1.0).margin(1e-12));
}

TEST_CASE("tensors sum to one") {
    std::mt19937_64 rng(3);
    const auto cloud = random_cloud(rng, 500, 3);
    const auto grid = rasterize_grid(random_mixture(2, 3, 4), 64);
    const auto grid3 = rasterize_grid(random_mixture(3, 2, 5), 12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c3 = random_config(rng, 3, 1 + trial % 4, 2 + trial % 3);
        CHECK(box_mass_tensor(cloud, c3).total() == Approx(1.0).margin(1e-12));
        CHECK(box_mass_tensor(grid3, c3).total() == Approx(1.0).margin(1e-12));
        const auto c2 = random_config(rng, 2, 1 + trial % 4, 2 + trial % 3);
        CHECK(box_mass_tensor(grid, c2).total() == Approx(1.0).margin(1e-12));
        for (double x : box_mass_tensor(grid, c2).masses) CHECK(x >= 0.0);
    }
}

TEST_CASE("quantile offsets reproduce equal slabs") {
    std::mt19937_64 rng(8);
    const auto grid = rasterize_grid(random_mixture(2, 3, 9), 96);
    const auto cloud = random_cloud(rng, 3000, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const unsigned l = 1 + trial % 5;
        const Vec u = random_unit(rng, 2);
        const auto cg = complete_configuration(grid, u, {random_unit(rng, 2)}, l);
        const auto tg = box_mass_tensor(grid, cg);
        for (unsigned s = 0; s <= l; ++s) CHECK(tg.slab_mass(s) == Approx(1.0 / (l + 1)).margin(1e-10));
        const auto cc = complete_configuration(cloud, u, {random_unit(rng, 2)}, l);
        const auto tc = box_mass_tensor(cloud, cc);
        const double bound = cloud.quantization_bound();
        for (unsigned s = 0; s <= l; ++s) CHECK(std::abs(tc.slab_mass(s) - 1.0 / (l + 1)) <= 2.0 * bound);
    }
}

TEST_CASE("point cloud tensor matches a brute-force scan") {
    std::mt19937_64 rng(100);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 3;
        const auto mu = random_cloud(rng, 100, d);
        const auto cfg = random_config(rng, d, 1 + trial % 6, 2 + trial % 4);
        REQUIRE(box_mass_tensor(mu, cfg).masses == scan_oracle(*mu.cloud(), cfg).masses);
    }
}

TEST_CASE("negating directions permutes the tensor") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 2 + trial % 3;
        const unsigned l = 1 + trial % 5, m = 2 + trial % 3;
        const auto mu = random_cloud(rng, 400, d);
        const auto cfg = random_config(rng, d, l, m);
        const auto base = box_mass_tensor(mu, cfg);

        Configuration flip_u = cfg;
        for (auto& x : flip_u.u) x = -x;
        for (std::size_t i = 0; i < l; ++i) flip_u.parallel_offsets[i] = -cfg.parallel_offsets[l - 1 - i];
        const auto tu = box_mass_tensor(mu, flip_u);
        for (unsigned s = 0; s <= l; ++s)
            for (std::uint32_t b = 0; b < (1u << (m - 1)); ++b) REQUIRE(tu.at({l - s, b}) == base.at({s, b}));

        const unsigned j = trial % (m - 1);
        Configuration flip_v = cfg;
        for (auto& x : flip_v.extra_dirs[j]) x = -x;
        flip_v.extra_offsets[j] = -flip_v.extra_offsets[j];
        const auto tv = box_mass_tensor(mu, flip_v);
        for (unsigned s = 0; s <= l; ++s)
            for (std::uint32_t b = 0; b < (1u << (m - 1)); ++b) REQUIRE(tv.at({s, b ^ (1u << j)}) == base.at({s, b}));
    }
}

TEST_CASE("rigid rotation leaves the tensor unchanged") {
    std::mt19937_64 rng(23);
    const std::size_t d = 3, n = 1000;
    const auto mu = random_cloud(rng, n, d);
    // orthogonal matrix from Gram-Schmidt on random columns
    std::vector<Vec> q;
    while (q.size() < d) {
        Vec v = random_unit(rng, d);
        for (const auto& e : q) {
            const double c = dot(v, e);
            for (std::size_t k = 0; k < d; ++k) v[k] -= c * e[k];
        }
        q.push_back(normalized(v));
    }
    auto rotate = [&](std::span<const double> x) {
        Vec y(d, 0.0);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t k = 0; k < d; ++k) y[r] += q[r][k] * x[k];
        return y;
    };
    Vec coords;
    for (std::size_t i = 0; i < n; ++i) {
        const auto y = rotate(mu.cloud()->point(i));
        coords.insert(coords.end(), y.begin(), y.end());
    }
    const auto rotated = Measure::point_cloud(d, coords, mu.cloud()->weights);
    for (int trial = 0; trial < 10; ++trial) {
        const auto cfg = random_config(rng, d, 3, 3);
        Configuration rc = cfg;
        rc.u = rotate(cfg.u);
        for (auto& v : rc.extra_dirs) v = rotate(v);
        const auto a = box_mass_tensor(mu, cfg), b = box_mass_tensor(rotated, rc);
        for (std::size_t i = 0; i < a.masses.size(); ++i) REQUIRE(std::abs(a.masses[i] - b.masses[i]) <= 1e-12);
    }
}

TEST_CASE("cell clipping agrees with fine subsampling") {
    std::mt19937_64 rng(31);
    const double h[2] = {0.7, 1.3};
    const int fine = 600;
    std::uniform_real_distribution<double> off(-0.6, 0.6);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<detail::HalfPlane> cuts;
        const int count = 1 + trial % 3;
        for (int c = 0; c < count; ++c) {
            const Vec dir = random_unit(rng, 2);
            cuts.push_back(c % 2 ? detail::above(dir, off(rng)) : detail::below(dir, off(rng)));
        }
        std::size_t inside = 0;
        for (int a = 0; a < fine; ++a)
            for (int b = 0; b < fine; ++b) {
                const double x[2] = {(a + 0.5) / fine * h[0] - 0.5 * h[0], (b + 0.5) / fine * h[1] - 0.5 * h[1]};
                bool in = true;
                for (const auto& c : cuts) in = in && c.a0 * x[0] + c.a1 * x[1] <= c.b;
                inside += in;
            }
        const double sampled = static_cast<double>(inside) / (fine * fine);
        CHECK(detail::clipped_fraction(2, h, cuts) == Approx(sampled).margin(5e-3));
    }
}

TEST_CASE("three-dimensional grids are lumped into subcells") {
    const auto mu = rasterize_grid(isotropic_gaussian(3), 24, 5.0);
    CHECK_FALSE(mu.exact_grid());
    REQUIRE(mu.evaluation_cloud() != nullptr);
    CHECK(mu.evaluation_cloud()->size() == 24 * 24 * 24 * 8);
    const auto cfg = complete_configuration(mu, Vec{1, 0, 0}, {Vec{0, 1, 0}, Vec{0, 0, 1}}, 1);
    const auto t = box_mass_tensor(mu, cfg);
    for (double x : t.masses) CHECK(x == Approx(0.125).margin(2e-3));
}

TEST_CASE("invalid measures and configurations") {
    CHECK_THROWS_AS(Measure::point_cloud(2, {1, 2, 3}), Error);
    CHECK_THROWS_AS(Measure::point_cloud(1, {1, 2}, {1, -1}), Error);
    CHECK_THROWS_AS(Measure::grid(2, {0, 0}, {1, 1}, {1, 2}, {1, 1}), Error);
    const auto mu = Measure::point_cloud(2, {0, 0, 1, 1});
    CHECK_THROWS_AS(direction_quantiles(mu, Vec{0, 0}, 1), Error);
    Configuration cfg{{1, 0}, {{0, 1}}, {}, {}};
    try {
        (void)box_mass_tensor(mu, cfg);
        FAIL("expected UnpopulatedOffsets");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnpopulatedOffsets);
    }
}
