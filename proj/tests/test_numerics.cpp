#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/numerics.hpp"

using namespace blowup;
using namespace blowup::numerics;

namespace {
constexpr double kPi = std::numbers::pi;

QuadratureSpec tight() {
    QuadratureSpec s;
    s.rel_tol = 1e-13;
    return s;
}
}  // namespace

TEST_CASE("halfline quadrature of exact integrals") {
    CHECK(integrate_halfline([](double r) { return std::exp(-r); }, tight()).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_halfline([](double r) { return r / ((r * r + 1) * (r * r + 1)); }, tight())
              .value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("halfline quadrature matches the Gamma closed form") {
    // Oracle: Gamma(5/2) Gamma(7/2) / (2 Gamma(6)) from the Beta integral.
    const double oracle = std::tgamma(2.5) * std::tgamma(3.5) / (2.0 * std::tgamma(6.0));
    CHECK(oracle == doctest::Approx(45.0 * kPi / 32.0 / 240.0).epsilon(1e-14));
    const double v =
        integrate_halfline([](double r) { return std::pow(r, 4) / std::pow(r * r + 1, 6); }, tight())
            .value;
    CHECK(std::abs(v - oracle) <= 1e-12 * oracle);
}

TEST_CASE("halfline quadrature is linear") {
    Rng rng(11);
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    for (int trial = 0; trial < 10; ++trial) {
        const double p = 2.0 + 3.0 * rng.uniform();
        const double q = 2.0 + 3.0 * rng.uniform();
        const double a = rng.normal(), b = rng.normal();
        auto f = [p](double r) { return 1.0 / std::pow(1.0 + r, p); };
        auto g = [q](double r) { return r / std::pow(1.0 + r * r, q); };
        const double If = integrate_halfline(f, spec).value;
        const double Ig = integrate_halfline(g, spec).value;
        const auto Ih = integrate_halfline([&](double r) { return a * f(r) + b * g(r); }, spec);
        const double budget = 4e-12 * (std::abs(a * If) + std::abs(b * Ig)) + Ih.error;
        CHECK(std::abs(Ih.value - a * If - b * Ig) <= budget);
        // Closed forms for both families.
        CHECK(If == doctest::Approx(1.0 / (p - 1.0)).epsilon(1e-11));
        CHECK(Ig == doctest::Approx(0.5 / (q - 1.0)).epsilon(1e-11));
    }
}

TEST_CASE("finite interval quadrature and non-convergence") {
    QuadratureSpec spec = tight();
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, kPi, spec).value ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, spec).value ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    // Reversed limits flip the sign.
    CHECK(integrate([](double x) { return x; }, 1.0, 0.0, spec).value ==
          doctest::Approx(-0.5).epsilon(1e-14));
    QuadratureSpec starved;
    starved.rel_tol = 1e-14;
    starved.max_subdivisions = 2;
    CHECK_THROWS_AS(integrate([](double x) { return std::sin(200 * x) * std::sqrt(x); }, 0.0,
                              10.0, starved),
                    NonConvergence);
}

TEST_CASE("nested 2D quadrature over a triangle") {
    // int_0^1 int_0^x (x + y) dy dx = 1/2
    const auto r = integrate_2d([](double x, double y) { return x + y; }, 0.0, 1.0,
                                [](double) { return 0.0; }, [](double x) { return x; }, tight());
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("QuadratureSpec validation") {
    QuadratureSpec s;
    s.rel_tol = 0.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.max_subdivisions = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.mc_samples = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("gamma function") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));
    CHECK(gamma_fn(6.0) == doctest::Approx(120.0).epsilon(1e-13));
    CHECK(log_gamma_fn(20.0) == doctest::Approx(std::log(121645100408832000.0)).epsilon(1e-13));
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
}

TEST_CASE("finite-difference stencils") {
    const int n = 5;
    FieldFn sq = [](std::span<const double> x) {
        double s = 0;
        for (double v : x) s += v * v;
        return s;
    };
    std::vector<double> zero(n, 0.0);
    for (double g : fd_gradient(sq, zero, 1e-3)) CHECK(std::abs(g) < 1e-14);
    CHECK(fd_laplacian(sq, zero, 1e-3) == doctest::Approx(2.0 * n).epsilon(1e-8));

    FieldFn x1 = [](std::span<const double> x) { return x[0]; };
    std::vector<double> pt{0.3, -1.2, 2.0, 0.7, 0.1};
    const auto g = fd_gradient(x1, pt, 1e-3);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 1; i < n; ++i) CHECK(std::abs(g[static_cast<std::size_t>(i)]) < 1e-14);
    CHECK(std::abs(fd_laplacian(x1, pt, 1e-3)) < 1e-7);
}

TEST_CASE("finite-difference convergence order is at least two") {
    FieldFn f = [](std::span<const double> x) {
        return std::sin(x[0]) * std::exp(0.5 * x[1]) + std::cos(x[2] * x[0]);
    };
    std::vector<double> x{0.4, -0.3, 0.9};
    const double gx = std::cos(0.4) * std::exp(-0.15) - 0.9 * std::sin(0.36);
    const double lap = -std::sin(0.4) * std::exp(-0.15) + 0.25 * std::sin(0.4) * std::exp(-0.15) -
                       (0.81 + 0.16) * std::cos(0.36);
    double prev_g = 0, prev_l = 0;
    for (double h : {1e-1, 5e-2, 2.5e-2}) {
        const double eg = std::abs(fd_gradient(f, x, h)[0] - gx);
        const double el = std::abs(fd_laplacian(f, x, h) - lap);
        if (prev_g > 0) {
            CHECK(prev_g / eg >= 3.5);
            CHECK(prev_l / el >= 3.5);
        }
        prev_g = eg;
        prev_l = el;
    }
}

TEST_CASE("polynomial fits") {
    std::vector<double> x1{1, 2, 3}, y1{2, 4, 6};
    auto f1 = fit_polynomial(x1, y1, 1);
    CHECK(std::abs(f1.coefficients[0]) < 1e-12);
    CHECK(f1.coefficients[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f1.residual_norm >= 0.0);

    std::vector<double> x2{0, 1, 2}, y2{1, 2, 5};
    auto f2 = fit_polynomial(x2, y2, 2);
    CHECK(f2.coefficients[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f2.coefficients[1]) < 1e-12);
    CHECK(f2.coefficients[2] == doctest::Approx(1.0).epsilon(1e-12));

    // delta-samples of c0 + c1 d + c2 d^2 on the fit grid.
    std::vector<double> ds, vs;
    for (int i = 0; i < 8; ++i) {
        const double d = 1e-3 * std::pow(10.0, i / 7.0);
        ds.push_back(d);
        vs.push_back(3.0 - 7.0 * d + 11.0 * d * d);
    }
    auto f3 = fit_polynomial(ds, vs, 2);
    CHECK(std::abs(f3.coefficients[1] - (-7.0)) <= 1e-10 * 7.0);
}

TEST_CASE("polynomial fits reproduce exact data up to degree four") {
    Rng rng(5);
    for (int degree = 0; degree <= 4; ++degree) {
        std::vector<double> c(static_cast<std::size_t>(degree) + 1);
        for (auto& v : c) v = rng.normal();
        std::vector<double> xs, ys;
        for (int i = 0; i < 12; ++i) {
            const double x = -1.0 + 2.0 * i / 11.0;
            double y = 0;
            for (int k = degree; k >= 0; --k) y = y * x + c[static_cast<std::size_t>(k)];
            xs.push_back(x);
            ys.push_back(y);
        }
        const auto fit = fit_polynomial(xs, ys, degree);
        for (int k = 0; k <= degree; ++k)
            CHECK(std::abs(fit.coefficients[static_cast<std::size_t>(k)] -
                           c[static_cast<std::size_t>(k)]) <= 1e-10 * (1.0 + std::abs(c[static_cast<std::size_t>(k)])));
    }
}

TEST_CASE("singular fits are rejected") {
    std::vector<double> x{1, 1, 1}, y{1, 2, 3};
    CHECK_THROWS_AS(fit_polynomial(x, y, 1), SingularFit);
    std::vector<double> x2{1, 2}, y2{1, 2};
    CHECK_THROWS_AS(fit_polynomial(x2, y2, 2), SingularFit);
}

TEST_CASE("log-log fit recovers a power law") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 6; ++i) {
        xs.push_back(std::pow(2.0, -i));
        ys.push_back(3.0 * std::pow(xs.back(), 2.5));
    }
    const auto fit = fit_loglog(xs, ys);
    CHECK(fit.coefficients[1] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(std::exp(fit.coefficients[0]) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("bracketed root finding") {
    CHECK(find_root_bracketed([](double x) { return x * x - 2; }, 1, 2, 1e-12) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(find_root_bracketed([](double x) { return std::cos(x); }, 1, 2, 1e-12) ==
          doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK_THROWS_AS(find_root_bracketed([](double x) { return x * x + 1; }, -1, 1, 1e-12),
                    NoSignChange);
}

TEST_CASE("root finder stays inside the bracket") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double lo = -5 + 4 * rng.uniform();
        const double hi = 1 + 4 * rng.uniform();
        const double root = lo + (hi - lo) * rng.uniform();
        // Steep, nearly flat and kinked shapes all must stay bracketed.
        auto f = [root](double x) { return std::cbrt(x - root) + 1e-3 * (x - root); };
        const double r = find_root_bracketed(f, lo, hi, 1e-10);
        CHECK(r >= lo);
        CHECK(r <= hi);
        CHECK(std::abs(r - root) <= 1e-9);
    }
}

TEST_CASE("seeded generator and Monte Carlo") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng c(9);
    for (int i = 0; i < 100; ++i) {
        const auto v = c.unit_sphere(5);
        double s = 0;
        for (double x : v) s += x * x;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    // E[U^2] = 1/3 for U uniform on [0,1).
    const auto mc = monte_carlo([](Rng& r) { const double u = r.uniform(); return u * u; },
                                20000, 7);
    CHECK(mc.samples == 20000);
    CHECK(std::abs(mc.mean - 1.0 / 3.0) <= 4.0 * mc.standard_error);
    const auto again = monte_carlo([](Rng& r) { const double u = r.uniform(); return u * u; },
                                   20000, 7);
    CHECK(again.mean == mc.mean);
}

TEST_CASE("parallel_for writes by index and rethrows the lowest failure") {
    std::vector<int> out(100, 0);
    parallel_for(100, 4, [&](int i) { out[static_cast<std::size_t>(i)] = i * i; });
    for (int i = 0; i < 100; ++i) CHECK(out[static_cast<std::size_t>(i)] == i * i);
    try {
        parallel_for(10, 3, [](int i) {
            if (i == 3 || i == 7) throw NonConvergence("fail " + std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const NonConvergence& e) {
        CHECK(std::string(e.what()) == "fail 3");
    }
}
