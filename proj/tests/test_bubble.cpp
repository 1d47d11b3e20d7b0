#include <doctest.h>

#include <cmath>
#include <vector>

#include "blowup/bubble.hpp"
#include "blowup/errors.hpp"
#include "blowup/numerics.hpp"

using namespace blowup;

namespace {
std::vector<double> e_n(int n, double t) {
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    x.back() = t;
    return x;
}
}  // namespace

TEST_CASE("bubble value at a reference point") {
    ProblemParams p{6, 1.5};
    const double u = bubble_eval(p, {}, e_n(6, 1.0));
    CHECK(u == doctest::Approx(120.0 / 27.5625).epsilon(1e-14));
    CHECK(u == doctest::Approx(4.3537415).epsilon(1e-7));
    CHECK_THROWS_AS(bubble_eval(p, {}, e_n(6, -0.1)), DomainError);
    CHECK_THROWS_AS(bubble_eval({6, 0.9}, {}, e_n(6, 1.0)), DomainError);
    CHECK_THROWS_AS(bubble_eval(p, {0.0, {}}, e_n(6, 1.0)), ValidationError);
}

TEST_CASE("bubble scaling property") {
    numerics::Rng rng(2024);
    for (int i = 0; i < 20; ++i) {
        const int n = 5 + static_cast<int>(rng.uniform() * 4);
        ProblemParams p{n, 1.1 + 2 * rng.uniform()};
        const double delta = std::exp(-3 + 4 * rng.uniform());
        std::vector<double> xi(static_cast<std::size_t>(n - 1)), xi_scaled(xi.size());
        for (std::size_t k = 0; k < xi.size(); ++k) {
            xi[k] = rng.normal();
            xi_scaled[k] = xi[k] / delta;
        }
        std::vector<double> y(static_cast<std::size_t>(n)), dy(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = rng.normal();
        y.back() = std::abs(y.back());
        for (std::size_t k = 0; k < y.size(); ++k) dy[k] = delta * y[k];
        const double lhs = bubble_eval(p, {delta, xi}, dy);
        const double rhs = std::pow(delta, -(n - 2) / 2.0) * bubble_eval(p, {1.0, xi_scaled}, y);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
    }
}

TEST_CASE("bubble decays monotonically along rays and is positive") {
    ProblemParams p{7, 1.3};
    std::vector<double> dir{0.3, -0.5, 0.2, 0.7, -0.1, 0.4, 0.6};
    double prev = bubble_eval(p, {}, std::vector<double>(7, 0.0));
    CHECK(prev > 0);
    for (double t = 0.5; t < 1e4; t *= 1.7) {
        std::vector<double> x(dir);
        for (auto& c : x) c *= t;
        const double u = bubble_eval(p, {}, x);
        CHECK(u > 0);
        CHECK(u < prev);
        prev = u;
    }
}

TEST_CASE("translation covariance is exact") {
    ProblemParams p{6, 1.7};
    std::vector<double> xi{0.3, -1.0, 2.0, 0.5, 0.25};
    std::vector<double> x{1.0, 0.5, -0.25, 2.0, 0.125, 0.75};
    std::vector<double> shifted(x);
    for (std::size_t k = 0; k < xi.size(); ++k) shifted[k] += xi[k];
    CHECK(bubble_eval(p, {0.7, xi}, shifted) == bubble_eval(p, {0.7, {}}, x));
}

TEST_CASE("analytic gradient matches finite differences") {
    ProblemParams p{6, 1.5};
    const Bubble U(p, {});
    const auto x = e_n(6, 1.0);
    const auto g = U.grad(x);
    const auto gfd = numerics::fd_gradient(
        [&U](std::span<const double> q) { return U.eval_unchecked(q); }, x, 1e-4);
    for (int i = 0; i < 5; ++i) CHECK(g[static_cast<std::size_t>(i)] == 0.0);
    CHECK(std::abs(gfd.back() - g.back()) <= 1e-6 * std::abs(g.back()));
    // Closed form of dU/dx_n on the axis: alpha (2-n) (x_n + D) / Q^{n/2}.
    const double Q = 2.5 * 2.5 - 1.0;
    CHECK(g.back() == doctest::Approx(120.0 * -4.0 * 2.5 / std::pow(Q, 3)).epsilon(1e-14));
}

TEST_CASE("U solves the interior equation") {
    numerics::Rng rng(17);
    for (int n = 5; n <= 9; ++n) {
        ProblemParams p{n, 1.2 + rng.uniform()};
        const Bubble U(p, {0.8, {}});
        for (int i = 0; i < 200; ++i) {
            std::vector<double> x(static_cast<std::size_t>(n));
            for (auto& c : x) c = 2 * rng.normal();
            x.back() = std::abs(x.back());
            CHECK(U.interior_residual(x).relative() <= 1e-12);
        }
    }
}

TEST_CASE("boundary condition holds exactly and fails for a perturbed amplitude") {
    numerics::Rng rng(8);
    for (int n = 5; n <= 9; ++n)
        for (double D : {1.2, 2.0})
            for (double delta : {1.0, 0.01, 37.0}) {
                ProblemParams p{n, D};
                const Bubble U(p, {delta, {}});
                const Bubble bad(p, {delta, {}}, 1.01);
                for (int i = 0; i < 20; ++i) {
                    std::vector<double> xbar(static_cast<std::size_t>(n - 1));
                    for (auto& c : xbar) c = 3 * delta * rng.normal();
                    CHECK(U.boundary_residual(xbar).relative() <= 1e-12);
                    CHECK(bad.boundary_residual(xbar).relative() >= 1e-3);
                }
            }
}

TEST_CASE("kernel functions") {
    ProblemParams p{6, 1.5};
    std::vector<double> x{0.0, 0.4, -0.3, 0.2, 0.1, 0.7};
    CHECK(kernel_eval(p, 1, x) == 0.0);
    // Zero set of J_n: |x|^2 = D^2 - 1.
    std::vector<double> on_sphere{0.0, 0.0, 0.0, 0.0, std::sqrt(1.25 - 0.25), 0.5};
    CHECK(std::abs(kernel_eval(p, 6, on_sphere)) <= 1e-13 * std::abs(kernel_eval(p, 6, x)));
    CHECK_THROWS_AS(kernel_eval(p, 0, x), ValidationError);
    CHECK_THROWS_AS(kernel_eval(p, 7, x), ValidationError);
    CHECK_THROWS_AS(kernel_eval(p, 6, e_n(6, -1.0)), DomainError);
}

TEST_CASE("J_i equals the x_i derivative of U and J_n the delta derivative") {
    ProblemParams p{7, 2.0};
    std::vector<double> x{0.3, -0.2, 0.5, 0.1, -0.4, 0.25, 0.6};
    const auto g = bubble_grad(p, {}, x);
    for (int i = 1; i <= 6; ++i)
        CHECK(kernel_eval(p, i, x) == doctest::Approx(g[static_cast<std::size_t>(i - 1)]).epsilon(1e-13));
    const double h = 1e-5;
    const double fd = (bubble_eval(p, {1 + h, {}}, x) - bubble_eval(p, {1 - h, {}}, x)) / (2 * h);
    CHECK(std::abs(fd - kernel_eval(p, 7, x)) <= 1e-8 * std::abs(kernel_eval(p, 7, x)));
}

TEST_CASE("linearized residuals vanish for every kernel function") {
    ProblemParams p{6, 1.5};
    numerics::Rng rng(99);
    double worst_in = 0, worst_bd = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x(6);
        for (auto& c : x) c = 1.5 * rng.normal();
        x.back() = std::abs(x.back());
        std::vector<double> xbar(x.begin(), x.end() - 1);
        for (int j = 1; j <= 6; ++j) {
            worst_in = std::max(worst_in, linearized_residual(p, j, x, Where::interior).relative());
            worst_bd = std::max(worst_bd, linearized_residual(p, j, xbar, Where::boundary).relative());
        }
    }
    CHECK(worst_in <= 1e-10);
    CHECK(worst_bd <= 1e-10);
}

TEST_CASE("the bubble itself is not in the kernel of the linearized boundary operator") {
    for (int n : {5, 6, 8}) {
        ProblemParams p{n, 1.5};
        std::vector<double> xbar(static_cast<std::size_t>(n - 1), 0.3);
        const auto r = linearized_residual(p, 1, xbar, Where::boundary, true);
        CHECK(r.relative() >= 1e-3);
        // Exact value: the two terms differ by the factor n/(n-2).
        CHECK(r.relative() == doctest::Approx(1.0 / (n - 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("randomized verifiers") {
    for (int n = 5; n <= 9; ++n)
        for (double D : {1.2, 1.5, 2.0}) {
            const auto b = verify_bubble({n, D}, 300, 42);
            CHECK(b.max_interior <= 1e-12);
            CHECK(b.max_interior_fd <= 1e-6);
            CHECK(b.max_boundary <= 1e-12);
            CHECK(b.max_gradient_fd <= 1e-6);
            const auto k = verify_kernel({n, D}, 100, 7);
            CHECK(k.max_interior <= 1e-10);
            CHECK(k.max_boundary <= 1e-10);
            CHECK(k.max_dilation_fd <= 1e-8);
        }
}

TEST_CASE("kernel orthogonality in the Dirichlet inner product") {
    // int grad J_1 . grad J_n over the half space, in coordinates
    // (x_1, rho = |(x_2, x_3, x_4)|, x_n) for n = 5. The two half spaces
    // x_1 > 0 and x_1 < 0 are integrated separately and must cancel.
    ProblemParams p{5, 1.5};
    numerics::QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    const double om = 4.0 * std::acos(-1.0);  // |S^2|
    const double R = 60.0;                      // tails decay like |x|^{-2n}
    const std::vector<double> bps{0.5, 2.0, 8.0, 20.0};
    auto side = [&](double sign) {
        auto over_xn = [&](double xn) {
            auto over_rho = [&](double rho) {
                auto f = [&](double t) {
                    const std::vector<double> x{sign * t, rho, 0.0, 0.0, xn};
                    const auto a = kernel_derivs(p, 1, x).grad;
                    const auto b = kernel_derivs(p, 5, x).grad;
                    double dot = 0;
                    for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
                    return om * rho * rho * dot;
                };
                return numerics::integrate(f, 0.0, R, spec, bps).value;
            };
            return numerics::integrate(over_rho, 0.0, R, spec, bps).value;
        };
        return numerics::integrate(over_xn, 0.0, R, spec, bps).value;
    };
    const double plus = side(1.0), minus = side(-1.0);
    CHECK(std::abs(plus) > 0);
    CHECK(std::abs(plus + minus) <= 1e-6 * std::abs(plus));
}
