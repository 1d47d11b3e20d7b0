#include "blowup/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "blowup/errors.hpp"

namespace blowup {

using numerics::QuadratureSpec;

void ProblemParams::validate() const {
    if (n < 3) throw DomainError("n must be >= 3 (got " + std::to_string(n) + ")");
    if (!std::isfinite(D) || !(D > 1.0))
        throw DomainError("D must be a finite number > 1 (got " + std::to_string(D) + ")");
}

double ProblemParams::crit_exponent() const { return 2.0 * n / (n - 2.0); }
double ProblemParams::trace_exponent() const { return 2.0 * (n - 1.0) / (n - 2.0); }

double alpha(int n) {
    if (n < 3) throw DomainError("alpha: n must be >= 3");
    return std::pow(4.0 * n * (n - 1.0), (n - 2.0) / 4.0);
}

double omega(int k) {
    if (k < 0) throw DomainError("omega: k must be >= 0");
    const double h = 0.5 * (k + 1.0);
    return 2.0 * std::pow(std::numbers::pi, h) / numerics::gamma_fn(h);
}

double radial_moment(int n, double m, double k, double a) {
    if (!(a > 0.0)) throw DomainError("radial_moment: a must be > 0");
    const double s = 0.5 * (n + m - 1.0);
    if (!(s > 0.0)) throw Divergent("radial_moment: integrand not integrable at r = 0");
    if (!(k > s))
        throw Divergent("radial integral diverges: n + m - 1 >= 2k");
    return omega(n - 2) * numerics::gamma_fn(s) * numerics::gamma_fn(k - s) /
           (2.0 * numerics::gamma_fn(k) * std::pow(a, k - s));
}

namespace {

double radial_integral_quadrature(const ProblemParams& p, RadialIntegralIndex idx,
                                  const QuadratureSpec& spec) {
    const double a = p.D * p.D - 1.0;
    const int power = p.n - 2 + idx.m;
    auto f = [&](double r) {
        if (r == 0.0) return power == 0 ? std::pow(a, -idx.k) : 0.0;
        return std::exp(power * std::log(r) - idx.k * std::log(r * r + a));
    };
    return omega(p.n - 2) * numerics::integrate_halfline(f, spec, std::sqrt(a)).value;
}

// Quadrature runs tighter than the agreement target so that its own error
// does not consume the comparison budget.
QuadratureSpec tightened(const QuadratureSpec& spec) {
    QuadratureSpec t = spec;
    t.rel_tol = std::max(spec.rel_tol * 1e-2, 1e-14);
    return t;
}

}  // namespace

double radial_integral(const ProblemParams& params, RadialIntegralIndex idx, RadialMethod method,
                       const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    if (idx.m < 0) throw DomainError("radial_integral: m must be >= 0");
    if (idx.k < 1) throw DomainError("radial_integral: k must be >= 1");
    if (params.n + idx.m - 1 >= 2 * idx.k)
        throw Divergent("radial integral B(m=" + std::to_string(idx.m) + ", k=" +
                        std::to_string(idx.k) + ") diverges for n=" + std::to_string(params.n) +
                        ": n + m - 1 >= 2k");
    const double a = params.D * params.D - 1.0;
    switch (method) {
        case RadialMethod::gamma:
            return radial_moment(params.n, idx.m, idx.k, a);
        case RadialMethod::quadrature:
            return radial_integral_quadrature(params, idx, tightened(spec));
        case RadialMethod::both: {
            const double g = radial_moment(params.n, idx.m, idx.k, a);
            const double q = radial_integral_quadrature(params, idx, tightened(spec));
            if (!(std::abs(g - q) <= spec.rel_tol * std::abs(g)))
                throw NonConvergence("radial_integral: Gamma form " + std::to_string(g) +
                                     " and quadrature " + std::to_string(q) + " disagree");
            return g;
        }
    }
    throw ValidationError("radial_integral: unknown method");
}

namespace {

// int_0^inf  M(0, k; (t + D)^2 - 1) dt : a half-space integral of Q^{-k}
// with the x-bar directions done in closed form.
double half_space_moment(const ProblemParams& p, double k, const QuadratureSpec& spec) {
    if (!(2.0 * k > p.n)) throw Divergent("half-space integral of Q^{-k} diverges: 2k <= n");
    auto f = [&](double t) {
        const double a = (t + p.D) * (t + p.D) - 1.0;
        return radial_moment(p.n, 0.0, k, a);
    };
    return numerics::integrate_halfline(f, spec).value;
}

// int_0^inf dt int_0^inf omega r^{n-2} g(r, t) dr, both by quadrature.
double half_space_direct(const ProblemParams& p, const std::function<double(double)>& g_of_q,
                         const QuadratureSpec& spec) {
    const double om = omega(p.n - 2);
    auto outer = [&](double t) {
        const double a = (t + p.D) * (t + p.D) - 1.0;
        auto inner = [&](double r) {
            if (r == 0.0) return 0.0;
            return std::pow(r, p.n - 2) * g_of_q(r * r + a);
        };
        return numerics::integrate_halfline(inner, spec, std::sqrt(a)).value;
    };
    return om * numerics::integrate_halfline(outer, spec).value;
}

}  // namespace

double bubble_norm(const ProblemParams& params, NormKind kind, const QuadratureSpec& spec,
                   NormMethod method) {
    params.validate();
    spec.validate();
    const int n = params.n;
    const double al = alpha(n);
    const double nd = n;
    const bool direct = method == NormMethod::direct_2d;
    auto qpow = [](double k) { return [k](double q) { return std::pow(q, -k); }; };

    switch (kind) {
        case NormKind::grad_sq: {
            // |grad U_1|^2 = alpha^2 (n-2)^2 (Q^{1-n} + Q^{-n})
            const double pre = al * al * (nd - 2) * (nd - 2);
            if (direct)
                return pre * half_space_direct(
                                 params, [n](double q) { return std::pow(q, 1 - n) + std::pow(q, -n); },
                                 spec);
            return pre * (half_space_moment(params, nd - 1, spec) + half_space_moment(params, nd, spec));
        }
        case NormKind::l2_volume: {
            if (n < 5) throw Divergent("int U_1^2 diverges for n <= 4 (log divergence at n = 4)");
            const double k = nd - 2;
            return al * al *
                   (direct ? half_space_direct(params, qpow(k), spec) : half_space_moment(params, k, spec));
        }
        case NormKind::crit_volume: {
            const double pre = std::pow(al, params.crit_exponent());
            return pre * (direct ? half_space_direct(params, qpow(nd), spec)
                                 : half_space_moment(params, nd, spec));
        }
        case NormKind::crit_trace: {
            const double pre = std::pow(al, params.trace_exponent());
            return pre * radial_integral(params, {0, n - 1},
                                         direct ? RadialMethod::quadrature : RadialMethod::gamma, spec);
        }
        case NormKind::l2n_np2_volume: {
            if (n < 7)
                throw Divergent("||U_1||_{L^{2n/(n+2)}} is infinite for n <= 6");
            const double q = 2.0 * nd / (nd + 2.0);
            const double k = (nd - 2.0) * q / 2.0;
            const double integral =
                direct ? half_space_direct(params, qpow(k), spec) : half_space_moment(params, k, spec);
            return al * std::pow(integral, 1.0 / q);
        }
        case NormKind::trace_l2: {
            return al * al *
                   radial_integral(params, {0, n - 2},
                                   direct ? RadialMethod::quadrature : RadialMethod::gamma, spec);
        }
    }
    throw ValidationError("bubble_norm: unknown kind");
}

double bubble_energy_constant(const ProblemParams& params, const QuadratureSpec& spec) {
    params.validate();
    if (params.n < 5) throw DomainError("bubble_energy_constant: n must be >= 5");
    const double n = params.n;
    return 2.0 * (n - 1.0) / (n - 2.0) * bubble_norm(params, NormKind::grad_sq, spec) +
           (n - 2.0) / (2.0 * n) * bubble_norm(params, NormKind::crit_volume, spec) -
           (n - 2.0) * params.D / std::sqrt(n * (n - 1.0)) *
               bubble_norm(params, NormKind::crit_trace, spec);
}

std::string to_string(NormKind kind) {
    switch (kind) {
        case NormKind::grad_sq: return "grad_sq";
        case NormKind::l2_volume: return "l2_volume";
        case NormKind::crit_volume: return "crit_volume";
        case NormKind::crit_trace: return "crit_trace";
        case NormKind::l2n_np2_volume: return "l2n_np2_volume";
        case NormKind::trace_l2: return "trace_l2";
    }
    return "unknown";
}

NormKind norm_kind_from_string(const std::string& name) {
    for (auto k : {NormKind::grad_sq, NormKind::l2_volume, NormKind::crit_volume,
                   NormKind::crit_trace, NormKind::l2n_np2_volume, NormKind::trace_l2})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown bubble norm kind: " + name);
}

std::string to_string(RadialMethod method) {
    switch (method) {
        case RadialMethod::gamma: return "gamma";
        case RadialMethod::quadrature: return "quadrature";
        case RadialMethod::both: return "both";
    }
    return "unknown";
}

RadialMethod radial_method_from_string(const std::string& name) {
    for (auto m : {RadialMethod::gamma, RadialMethod::quadrature, RadialMethod::both})
        if (to_string(m) == name) return m;
    throw ValidationError("unknown radial method: " + name);
}

}  // namespace blowup
