#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blowup/constants.hpp"
#include "blowup/errors.hpp"

using namespace blowup;

namespace {
constexpr double kPi = std::numbers::pi;

// Frozen oracles from an independent 30-digit nested quadrature of the
// bubble integrands (r and x_n both numerical).
struct NormOracle {
    int n;
    double D, grad_sq, crit_volume, crit_trace, l2_volume, energy;
};
constexpr NormOracle kOracles[] = {
    {6, 1.5, 36583.462340099007, 56694.572386616212, 87493.889307215992, 12711.610501788393,
     14512.093010941756},
    {7, 1.5, 555480.36345781992, 818222.85799286802, 1254573.6849763277, 93408.752653230677,
     173488.40383593344},
    {5, 2.0, 682.7610286885846, 543.56431075564342, 1169.730891980961, 1939.6313150467534,
     414.40669581904981},
};
}  // namespace

TEST_CASE("alpha") {
    CHECK(alpha(6) == doctest::Approx(120.0).epsilon(1e-14));
    CHECK(alpha(4) == doctest::Approx(std::sqrt(48.0)).epsilon(1e-14));
    CHECK(alpha(3) == doctest::Approx(std::pow(24.0, 0.25)).epsilon(1e-14));
    CHECK(alpha(3) == doctest::Approx(2.2133638).epsilon(1e-7));
    CHECK_THROWS_AS(alpha(2), DomainError);
}

TEST_CASE("alpha power identities used by the reduced constant") {
    for (int n = 3; n <= 12; ++n) {
        ProblemParams p{n, 1.5};
        const double a = alpha(n);
        CHECK(std::pow(a, p.crit_exponent()) ==
              doctest::Approx(4.0 * n * (n - 1.0) * a * a).epsilon(1e-12));
        CHECK(std::pow(a, p.trace_exponent()) ==
              doctest::Approx(2.0 * std::sqrt(n * (n - 1.0)) * a * a).epsilon(1e-12));
    }
}

TEST_CASE("omega") {
    CHECK(omega(1) == doctest::Approx(2 * kPi).epsilon(1e-14));
    CHECK(omega(2) == doctest::Approx(4 * kPi).epsilon(1e-14));
    CHECK(omega(4) == doctest::Approx(8 * kPi * kPi / 3).epsilon(1e-14));
    CHECK(omega(4) == doctest::Approx(26.3189450).epsilon(1e-8));
    CHECK(omega(0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(omega(-1), DomainError);
    // Gaussian check: int_{R^5} e^{-|x|^2} = pi^{5/2} = omega_4 int r^4 e^{-r^2} dr.
    const double radial = numerics::integrate_halfline(
                              [](double r) { return std::pow(r, 4) * std::exp(-r * r); }, {})
                              .value;
    CHECK(omega(4) * radial == doctest::Approx(std::pow(kPi, 2.5)).epsilon(1e-10));
}

TEST_CASE("radial integral examples") {
    ProblemParams p{6, std::sqrt(2.0)};
    CHECK(radial_integral(p, {2, 6}) == doctest::Approx(std::pow(kPi, 3) / 64).epsilon(1e-13));
    CHECK(radial_integral(p, {2, 6}, RadialMethod::quadrature) ==
          doctest::Approx(std::pow(kPi, 3) / 64).epsilon(1e-12));
    CHECK(radial_integral(p, {2, 6}, RadialMethod::both) ==
          doctest::Approx(0.4844733).epsilon(1e-6));
    CHECK_THROWS_AS(radial_integral(p, {8, 6}), Divergent);
    // omega_4 Gamma(5/2) Gamma(3/2) / (2 Gamma(4)) at a = 1 equals pi^3/12.
    const double shifted = 8 * kPi * kPi / 3 * (3 * std::sqrt(kPi) / 4) * (std::sqrt(kPi) / 2) / 12;
    CHECK(shifted == doctest::Approx(std::pow(kPi, 3) / 12).epsilon(1e-14));
    CHECK(radial_integral(p, {0, 4}, RadialMethod::both) == doctest::Approx(shifted).epsilon(1e-13));
    CHECK(radial_integral(p, {0, 4}) == doctest::Approx(2.5838564).epsilon(1e-7));
}

TEST_CASE("radial integral validation") {
    CHECK_THROWS_AS(radial_integral({6, 1.0}, {0, 6}), DomainError);
    CHECK_THROWS_AS(radial_integral({6, 0.5}, {0, 6}), DomainError);
    CHECK_THROWS_AS(radial_integral({2, 1.5}, {0, 6}), DomainError);
    CHECK_THROWS_AS(radial_integral({6, 1.5}, {-1, 6}), DomainError);
    CHECK_THROWS_AS(radial_integral({6, 1.5}, {0, 0}), DomainError);
    // Boundary of convergence: n + m - 1 = 2k.
    CHECK_THROWS_AS(radial_integral({7, 1.5}, {0, 3}), Divergent);
}

TEST_CASE("Gamma form agrees with quadrature on the full grid") {
    numerics::QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    int checked = 0;
    for (int n = 5; n <= 10; ++n)
        for (int m : {0, 2, 4})
            for (int k : {n - 2, n - 1, n})
                for (double D : {1.05, 1.1832, 1.5, 2.0, 5.0}) {
                    if (n + m - 1 >= 2 * k) continue;
                    ProblemParams p{n, D};
                    const double g = radial_integral(p, {m, k}, RadialMethod::gamma, spec);
                    const double q = radial_integral(p, {m, k}, RadialMethod::quadrature, spec);
                    CHECK(std::abs(g - q) <= 1e-10 * g);
                    ++checked;
                }
    CHECK(checked > 200);
}

TEST_CASE("radial integral scaling law and monotonicity in D") {
    for (int n = 5; n <= 9; ++n)
        for (int m : {0, 2}) {
            const int k = n;
            const double s = 0.5 * (n + m - 1);
            const double b1 = radial_integral({n, 1.3}, {m, k});
            const double b2 = radial_integral({n, 2.7}, {m, k});
            const double exponent = std::log(b2 / b1) / std::log((2.7 * 2.7 - 1) / (1.3 * 1.3 - 1));
            CHECK(std::abs(exponent + (k - s)) <= 1e-10 * (k - s));
            double prev = radial_integral({n, 1.01}, {m, k});
            for (double D = 1.1; D < 6.0; D += 0.25) {
                const double cur = radial_integral({n, D}, {m, k});
                CHECK(cur < prev);
                prev = cur;
            }
        }
}

TEST_CASE("bubble norms against the frozen nested-quadrature oracle") {
    for (const auto& o : kOracles) {
        ProblemParams p{o.n, o.D};
        CHECK(bubble_norm(p, NormKind::grad_sq) == doctest::Approx(o.grad_sq).epsilon(1e-9));
        CHECK(bubble_norm(p, NormKind::crit_volume) == doctest::Approx(o.crit_volume).epsilon(1e-9));
        CHECK(bubble_norm(p, NormKind::crit_trace) == doctest::Approx(o.crit_trace).epsilon(1e-12));
        CHECK(bubble_norm(p, NormKind::l2_volume) == doctest::Approx(o.l2_volume).epsilon(1e-9));
        CHECK(bubble_energy_constant(p) == doctest::Approx(o.energy).epsilon(1e-9));
    }
}

TEST_CASE("reduced and direct 2D norm paths agree") {
    numerics::QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    for (int n : {6, 7, 8}) {
        ProblemParams p{n, 1.5};
        for (auto kind : {NormKind::grad_sq, NormKind::l2_volume, NormKind::crit_volume,
                          NormKind::crit_trace, NormKind::trace_l2}) {
            const double a = bubble_norm(p, kind, spec, NormMethod::reduced);
            const double b = bubble_norm(p, kind, spec, NormMethod::direct_2d);
            CHECK(std::abs(a - b) <= 1e-8 * a);
        }
        if (n >= 7) {
            const double a = bubble_norm(p, NormKind::l2n_np2_volume, spec, NormMethod::reduced);
            const double b = bubble_norm(p, NormKind::l2n_np2_volume, spec, NormMethod::direct_2d);
            CHECK(std::abs(a - b) <= 1e-8 * a);
        }
    }
}

TEST_CASE("crit_trace is a pure radial integral") {
    ProblemParams p{6, 1.5};
    const double pre = std::pow(alpha(6), p.trace_exponent());
    const double g = radial_integral(p, {0, 5}, RadialMethod::gamma);
    const double q = radial_integral(p, {0, 5}, RadialMethod::quadrature);
    CHECK(std::abs(g - q) <= 1e-10 * g);
    CHECK(bubble_norm(p, NormKind::crit_trace) == doctest::Approx(pre * g).epsilon(1e-14));
}

TEST_CASE("bubble norm convergence conditions") {
    CHECK_THROWS_AS(bubble_norm({4, 1.5}, NormKind::l2_volume), Divergent);
    CHECK_THROWS_AS(bubble_norm({6, 1.5}, NormKind::l2n_np2_volume), Divergent);
    CHECK(bubble_norm({7, 1.5}, NormKind::l2n_np2_volume) > 0.0);
    CHECK(bubble_norm({5, 1.5}, NormKind::l2_volume) > 0.0);
    CHECK_THROWS_AS(bubble_energy_constant({4, 1.5}), DomainError);
}

TEST_CASE("energy constant is finite across D") {
    for (double D = 1.2; D <= 5.0 + 1e-12; D += 0.2) {
        const double e = bubble_energy_constant({6, D});
        CHECK(std::isfinite(e));
    }
}
