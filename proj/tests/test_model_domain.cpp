#include <doctest.h>

#include <cmath>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/model_domain.hpp"
#include "blowup/numerics.hpp"

using namespace blowup;

TEST_CASE("phi and its gradient") {
    const auto dom = uniform_domain(6, 1.0);
    const std::vector<double> zero(5, 0.0);
    CHECK(phi(dom, zero) == 0.0);
    const std::vector<double> x{0.1, 0, 0, 0, 0};
    CHECK(phi(dom, x) == doctest::Approx(0.01).epsilon(1e-14));
    const auto g = numerics::fd_gradient(
        [&](std::span<const double> p) { return phi(dom, p); }, zero, 1e-3);
    for (double v : g) CHECK(std::abs(v) < 1e-14);
    const std::vector<double> far{1.1, 0, 0, 0, 0};
    CHECK_THROWS_AS(phi(dom, far), DomainError);
}

TEST_CASE("mean curvature at the origin") {
    CHECK(mean_curvature(uniform_domain(6, 1.0), std::vector<double>(5, 0.0)) ==
          doctest::Approx(2.0).epsilon(1e-14));
    ModelDomain mixed{{1, 2, 3, 4, 5}, 1.0};
    CHECK(mean_curvature(mixed, std::vector<double>(5, 0.0)) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(mixed.mean_curvature_origin() == doctest::Approx(6.0).epsilon(1e-14));
    const auto flat = uniform_domain(6, 0.0);
    numerics::Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x(5);
        for (auto& c : x) c = 0.15 * rng.normal();
        CHECK(mean_curvature(flat, x) == 0.0);
    }
    numerics::Rng rk(4);
    for (int i = 0; i < 100; ++i) {
        ModelDomain d{std::vector<double>(6), 1.0};
        double s = 0;
        for (auto& k : d.curvatures) {
            k = 3 * rk.uniform();
            s += k;
        }
        CHECK(std::abs(mean_curvature(d, std::vector<double>(6, 0.0)) - 2 * s / 6) <= 1e-12 * s);
    }
}

TEST_CASE("mean curvature off the origin matches a finite-difference divergence") {
    ModelDomain d{{0.5, 1.0, 2.0, 1.5}, 1.0};
    const std::vector<double> x{0.2, -0.1, 0.15, 0.05};
    const double h = 1e-5;
    double div = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto unit_normal_i = [&](std::span<const double> p) {
            const auto g = grad_phi(d, p);
            double g2 = 0;
            for (double v : g) g2 += v * v;
            return g[i] / std::sqrt(1 + g2);
        };
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        div += (unit_normal_i(xp) - unit_normal_i(xm)) / (2 * h);
    }
    CHECK(mean_curvature(d, x) == doctest::Approx(div / 4).epsilon(1e-8));
    // The ray form agrees with the general one.
    double r2 = 0, k2 = 0, k3 = 0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double th2 = x[i] * x[i] / r2;
        k2 += d.curvatures[i] * d.curvatures[i] * th2;
        k3 += std::pow(d.curvatures[i], 3) * th2;
    }
    CHECK(mean_curvature_ray(5, 5.0, k2, k3, r) == doctest::Approx(mean_curvature(d, x)).epsilon(1e-13));
}

TEST_CASE("surface jacobian") {
    const auto d = uniform_domain(4, 2.0);
    const std::vector<double> x{0.1, 0.2, 0.0};
    CHECK(surface_jacobian(d, x) == doctest::Approx(std::sqrt(1 + 16 * 0.05)).epsilon(1e-14));
}

TEST_CASE("patch membership") {
    const auto d = uniform_domain(6, 1.0);
    CHECK(patch_membership(d, std::vector<double>{0.1, 0, 0, 0, 0, 0.005}) == PatchRegion::sigma);
    CHECK(sigma_membership(d, std::vector<double>{0.1, 0, 0, 0, 0, 0.005}));
    CHECK(patch_membership(d, std::vector<double>{0.1, 0, 0, 0, 0, 0.02}) == PatchRegion::omega);
    CHECK(patch_membership(d, std::vector<double>{1.1, 0, 0, 0, 0, 0.5}) == PatchRegion::outside);
    CHECK(patch_membership(d, std::vector<double>{0.1, 0, 0, 0, 0, 1.5}) == PatchRegion::outside);
    const auto flat = uniform_domain(6, 0.0);
    numerics::Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x(6);
        for (auto& c : x) c = 0.4 * rng.normal();
        x.back() = rng.uniform();
        CHECK_FALSE(sigma_membership(flat, x));
    }
}

TEST_CASE("Sigma and Omega partition the cylinder") {
    ModelDomain d{{1.0, 3.0, 0.5, 2.0, 4.0}, 1.0};
    numerics::Rng rng(77);
    int sigma = 0, omega = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto dir = rng.unit_sphere(5);
        const double r = std::pow(rng.uniform(), 1.0 / 5.0) * 0.999;
        std::vector<double> x(6);
        for (int k = 0; k < 5; ++k) x[static_cast<std::size_t>(k)] = r * dir[static_cast<std::size_t>(k)];
        x.back() = 1e-300 + rng.uniform() * 0.999;
        const auto region = patch_membership(d, x);
        CHECK(region != PatchRegion::outside);
        sigma += region == PatchRegion::sigma;
        omega += region == PatchRegion::omega;
    }
    CHECK(sigma + omega == 100000);
    CHECK(sigma > 0);
}

TEST_CASE("cutoff values") {
    const auto c = CutoffProfile::for_radius(1.0);
    CHECK(c.value(std::vector<double>{0.3, 0.1, 0.2, 0.4}) == 1.0);
    CHECK(c.value(std::vector<double>{1.0, 0.0, 0.0, 0.1}) == 0.0);
    CHECK(c.value(std::vector<double>{0.8, 0.7, 0.0, 0.1}) == 0.0);
    numerics::Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x(5);
        for (auto& v : x) v = rng.normal();
        const double chi = c.value(x);
        CHECK(chi >= 0.0);
        CHECK(chi <= 1.0);
    }
}

TEST_CASE("cutoff derivatives match finite differences") {
    const auto c = CutoffProfile::for_radius(1.0);
    numerics::Rng rng(21);
    auto f = [&](std::span<const double> p) { return c.value(p); };
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x(6);
        for (auto& v : x) v = 0.35 * rng.normal();
        x.back() = 0.2 + 0.7 * rng.uniform();
        const auto g = c.gradient(x);
        const auto gfd = numerics::fd_gradient(f, x, 1e-5);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(g[k] - gfd[k]) <= 1e-7);
        CHECK(std::abs(c.laplacian(x) - numerics::fd_laplacian(f, x, 1e-4)) <= 1e-5);
    }
}

TEST_CASE("cutoff bound constants are finite and stable under refinement") {
    const auto c = CutoffProfile::for_radius(1.0);
    for (int n : {5, 6, 7}) {
        const auto coarse = cutoff_bounds(c, n, 400);
        const auto fine = cutoff_bounds(c, n, 800);
        CHECK(std::isfinite(coarse.gradient_constant));
        CHECK(std::isfinite(coarse.laplacian_constant));
        CHECK(coarse.gradient_constant > 0);
        CHECK(std::abs(fine.gradient_constant / coarse.gradient_constant - 1) <= 0.01);
        CHECK(std::abs(fine.laplacian_constant / coarse.laplacian_constant - 1) <= 0.01);
    }
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS((ModelDomain{{}, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((ModelDomain{{1.0, -1.0}, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((ModelDomain{{1.0}, 0.0}.validate()), ValidationError);
    CHECK_NOTHROW((ModelDomain{{0.0, 2.0}, 0.5}.validate()));
}
