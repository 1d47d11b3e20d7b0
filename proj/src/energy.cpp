#include "blowup/energy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "blowup/errors.hpp"

namespace blowup {

using numerics::QuadratureSpec;

namespace {

// Curvature moments of one direction theta on S^{n-2}.
struct Direction {
    double kappa = 0.0;   // sum k_i theta_i^2
    double kappa2 = 0.0;  // sum k_i^2 theta_i^2
    double kappa3 = 0.0;  // sum k_i^3 theta_i^2
};

bool use_radial(const ModelDomain& domain, EnergyMethod method) {
    switch (method) {
        case EnergyMethod::radial:
            if (!domain.equal_curvatures())
                throw ValidationError("radial method needs equal curvatures");
            return true;
        case EnergyMethod::monte_carlo: return false;
        case EnergyMethod::automatic: break;
    }
    return domain.equal_curvatures();
}

std::vector<Direction> directions(const ModelDomain& domain, EnergyMethod method,
                                  const QuadratureSpec& spec) {
    if (use_radial(domain, method)) {
        const double k = domain.curvatures.front();
        return {{k, k * k, k * k * k}};
    }
    numerics::Rng rng(spec.rng_seed);
    std::vector<Direction> out(static_cast<std::size_t>(spec.mc_samples));
    const int dim = domain.dimension() - 1;
    for (auto& d : out) {
        const auto th = rng.unit_sphere(dim);
        for (int i = 0; i < dim; ++i) {
            const double k = domain.curvatures[static_cast<std::size_t>(i)];
            const double t2 = th[static_cast<std::size_t>(i)] * th[static_cast<std::size_t>(i)];
            d.kappa += k * t2;
            d.kappa2 += k * k * t2;
            d.kappa3 += k * k * k * t2;
        }
    }
    return out;
}

double sum_curvatures(const ModelDomain& d) {
    double s = 0.0;
    for (double k : d.curvatures) s += k;
    return s;
}

// Radius beyond which the graph leaves the cylinder C(rho).
double graph_radius(const ModelDomain& domain, double kappa) {
    return kappa > 0.0 ? std::min(domain.rho, std::sqrt(domain.rho / kappa)) : domain.rho;
}

void check_inputs(const ProblemParams& params, const ModelDomain& domain, const BubbleParams& bp,
                  const QuadratureSpec& spec) {
    params.validate();
    domain.validate();
    spec.validate();
    if (domain.dimension() != params.n)
        throw ValidationError("domain has " + std::to_string(domain.curvatures.size()) +
                              " curvatures, expected n-1 = " + std::to_string(params.n - 1));
    bp.validate(params.n);
    for (double v : bp.xi)
        if (v != 0.0) throw ValidationError("the bubble must be centred at the patch origin");
    if (bp.delta > domain.rho / 10.0)
        throw DomainError("delta must be <= rho/10 for the asymptotic regime");
}

std::vector<double> with(std::vector<double> v, std::initializer_list<double> extra) {
    v.insert(v.end(), extra.begin(), extra.end());
    std::sort(v.begin(), v.end());
    return v;
}

// The unit bubble in (r, t) = (|ybar|, y_n).
struct UnitBubble {
    int n;
    double D, al;
    double q(double r, double t) const { return r * r + (t + D) * (t + D) - 1.0; }
    double value(double r, double t) const { return al * std::pow(q(r, t), -(n - 2) / 2.0); }
    double grad_sq(double r, double t) const {
        return al * al * (n - 2.0) * (n - 2.0) * (r * r + (t + D) * (t + D)) * std::pow(q(r, t), -n);
    }
    // Partial derivatives d/dr and d/dt.
    double d_r(double r, double t) const { return -al * (n - 2.0) * r * std::pow(q(r, t), -n / 2.0); }
    double d_t(double r, double t) const {
        return -al * (n - 2.0) * (t + D) * std::pow(q(r, t), -n / 2.0);
    }
};

enum class Vol { grad, l2, crit };

// Volume integrand in scaled coordinates for W = chi U_delta. With
// cutoff == false the plain bubble is used.
struct VolumeIntegrand {
    UnitBubble u;
    CutoffProfile chi;
    double delta;
    double om;
    bool cutoff;

    double operator()(Vol which, double r, double t) const {
        const double w = om * std::pow(r, u.n - 2);
        if (w == 0.0) return 0.0;
        double c = 1.0, cr = 0.0, ct = 0.0;
        if (cutoff) {
            const double sr = chi.s(delta * r), st = chi.s(delta * t);
            c = sr * st;
            if (c == 0.0) return 0.0;
            cr = chi.ds(delta * r) * st;
            ct = sr * chi.ds(delta * t);
        }
        switch (which) {
            case Vol::grad: {
                double g = c * c * u.grad_sq(r, t);
                if (cutoff && (cr != 0.0 || ct != 0.0)) {
                    const double U = u.value(r, t);
                    g += 2.0 * delta * c * U * (cr * u.d_r(r, t) + ct * u.d_t(r, t)) +
                         delta * delta * (cr * cr + ct * ct) * U * U;
                }
                return w * g;
            }
            case Vol::l2: {
                const double U = c * u.value(r, t);
                return w * U * U;
            }
            case Vol::crit:
                return w * std::pow(c * u.value(r, t), 2.0 * u.n / (u.n - 2.0));
        }
        return 0.0;
    }
};

double cylinder_integral(const VolumeIntegrand& f, Vol which, double R, const QuadratureSpec& spec) {
    const auto bps = with(numerics::geometric_breakpoints(0.0, R, 0.25), {R / 2.0});
    return numerics::integrate_2d(
               [&](double r, double t) { return f(which, r, t); }, 0.0, R,
               [](double) { return 0.0; }, [R](double) { return R; }, spec, bps, bps)
        .value;
}

double sigma_integral(const VolumeIntegrand& f, Vol which, double R, double kappa,
                      const QuadratureSpec& spec) {
    if (kappa == 0.0) return 0.0;
    const double delta = f.delta;
    const auto bps = with(numerics::geometric_breakpoints(0.0, R, 0.25), {R / 2.0});
    return numerics::integrate_2d(
               [&](double r, double t) { return f(which, r, t); }, 0.0, R,
               [](double) { return 0.0; },
               [=](double r) { return std::min(delta * kappa * r * r, R); }, spec, bps, bps)
        .value;
}

struct BoundaryIntegrand {
    UnitBubble u;
    CutoffProfile chi;
    double delta, om, sum_k;
    Direction dir;
    bool cutoff;

    double height(double r) const { return delta * dir.kappa * r * r; }
    double jac(double r) const { return std::sqrt(1.0 + 4.0 * dir.kappa2 * delta * delta * r * r); }
    double c(double r) const {
        return cutoff ? chi.s(delta * r) * chi.s(delta * height(r)) : 1.0;
    }
    double crit(double r) const {
        const double w = om * std::pow(r, u.n - 2);
        const double sh = 2.0 * (u.n - 1.0) / (u.n - 2.0);
        return w * std::pow(c(r) * u.value(r, height(r)), sh) * jac(r);
    }
    // int H U^2 dsigma / delta in scaled variables.
    double curv(double r) const {
        const double w = om * std::pow(r, u.n - 2);
        const double H = mean_curvature_ray(u.n, sum_k, dir.kappa2, dir.kappa3, delta * r);
        const double U = c(r) * u.value(r, height(r));
        return w * H * U * U * jac(r);
    }
};

double boundary_integral(const std::function<double(double)>& f, double R,
                         const QuadratureSpec& spec) {
    const auto bps = with(numerics::geometric_breakpoints(0.0, R, 0.25), {R / 2.0});
    return numerics::integrate(f, 0.0, R, spec, bps).value;
}

struct DirectionalTerms {
    double grad = 0.0, l2 = 0.0, crit = 0.0, trace = 0.0, curv = 0.0;
};

}  // namespace

namespace {

EnergyBreakdown energy_terms_impl(const ProblemParams& params, const ModelDomain& domain,
                                  const BubbleParams& bp, const QuadratureSpec& spec,
                                  EnergyMethod method, int threads) {
    check_inputs(params, domain, bp, spec);
    const int n = params.n;
    const double nd = n;
    const double delta = bp.delta;
    const double R = domain.rho / delta;
    const UnitBubble u{n, params.D, alpha(n)};
    const auto chi = CutoffProfile::for_radius(domain.rho);
    const double om = omega(n - 2);
    const VolumeIntegrand vol{u, chi, delta, om, true};

    const double cyl_grad = cylinder_integral(vol, Vol::grad, R, spec);
    const double cyl_l2 = cylinder_integral(vol, Vol::l2, R, spec);
    const double cyl_crit = cylinder_integral(vol, Vol::crit, R, spec);

    const auto dirs = directions(domain, method, spec);
    const double sk = sum_curvatures(domain);
    std::vector<DirectionalTerms> per(dirs.size());
    numerics::parallel_for(static_cast<int>(dirs.size()), threads, [&](int i) {
        const Direction& d = dirs[static_cast<std::size_t>(i)];
        DirectionalTerms& t = per[static_cast<std::size_t>(i)];
        t.grad = sigma_integral(vol, Vol::grad, R, d.kappa, spec);
        t.l2 = sigma_integral(vol, Vol::l2, R, d.kappa, spec);
        t.crit = sigma_integral(vol, Vol::crit, R, d.kappa, spec);
        const BoundaryIntegrand b{u, chi, delta, om, sk, d, true};
        const double Rb = graph_radius(domain, d.kappa) / delta;
        t.trace = boundary_integral([&](double r) { return b.crit(r); }, Rb, spec);
        t.curv = boundary_integral([&](double r) { return b.curv(r); }, Rb, spec);
    });

    const double c1 = 2.0 * (nd - 1.0) / (nd - 2.0);
    const double c3 = (nd - 2.0) / (2.0 * nd);
    const double c4 = (nd - 2.0) * params.D / std::sqrt(nd * (nd - 1.0));
    auto stat = [&](const std::function<double(const DirectionalTerms&)>& g) {
        std::vector<double> xs;
        xs.reserve(per.size());
        for (const auto& t : per) xs.push_back(g(t));
        return numerics::sample_statistics(xs);
    };
    const auto s1 = stat([&](const DirectionalTerms& t) { return c1 * (cyl_grad - t.grad); });
    const auto s2 = stat([&](const DirectionalTerms& t) { return 0.5 * delta * delta * (cyl_l2 - t.l2); });
    const auto s3 = stat([&](const DirectionalTerms& t) { return c3 * (cyl_crit - t.crit); });
    const auto s4 = stat([&](const DirectionalTerms& t) { return -c4 * t.trace; });
    const auto s5 = stat([&](const DirectionalTerms& t) { return (nd - 1.0) * delta * t.curv; });

    EnergyBreakdown e;
    e.delta = delta;
    e.e1 = s1.mean;
    e.e2_coeff = s2.mean;
    e.e3 = s3.mean;
    e.e4 = s4.mean;
    e.e5 = s5.mean;
    e.e1_se = s1.standard_error;
    e.e2_se = s2.standard_error;
    e.e3_se = s3.standard_error;
    e.e4_se = s4.standard_error;
    e.e5_se = s5.standard_error;
    e.directions = static_cast<int>(dirs.size());
    return e;
}

}  // namespace

EnergyBreakdown energy_terms(const ProblemParams& params, const ModelDomain& domain,
                             const BubbleParams& bp, const QuadratureSpec& spec,
                             EnergyMethod method) {
    return energy_terms_impl(params, domain, bp, spec, method, numerics::default_thread_count());
}

double Comparison::rel_error() const {
    if (reference == 0.0) return std::abs(value);
    return std::abs(value - reference) / std::abs(reference);
}

std::vector<Comparison> sigma_corrections(const ProblemParams& params, const ModelDomain& domain,
                                          const BubbleParams& bp, const QuadratureSpec& spec,
                                          EnergyMethod method) {
    check_inputs(params, domain, bp, spec);
    const int n = params.n;
    const double nd = n, D = params.D;
    const double delta = bp.delta;
    const double R = domain.rho / delta;
    const double al = alpha(n);
    const UnitBubble u{n, D, al};
    const auto chi = CutoffProfile::for_radius(domain.rho);
    const double om = omega(n - 2);
    const VolumeIntegrand vol{u, chi, delta, om, false};
    const double sh = params.trace_exponent();
    const double sk = sum_curvatures(domain);

    const auto dirs = directions(domain, method, spec);
    std::vector<DirectionalTerms> per(dirs.size());
    numerics::parallel_for(static_cast<int>(dirs.size()), numerics::default_thread_count(), [&](int i) {
        const Direction& d = dirs[static_cast<std::size_t>(i)];
        DirectionalTerms& t = per[static_cast<std::size_t>(i)];
        t.crit = sigma_integral(vol, Vol::crit, R, d.kappa, spec) / delta;
        t.grad = sigma_integral(vol, Vol::grad, R, d.kappa, spec) / delta;
        t.l2 = sigma_integral(vol, Vol::l2, R, d.kappa, spec) / delta;  // * delta^2 / delta^3
        const BoundaryIntegrand b{u, chi, delta, om, sk, d, false};
        const double Rb = graph_radius(domain, d.kappa) / delta;
        // Graph minus flat trace, integrated as one difference to avoid
        // cancellation, then the flat tail beyond the patch.
        const double diff = boundary_integral(
            [&](double r) { return b.crit(r) - om * std::pow(r, n - 2) * std::pow(u.value(r, 0.0), sh); },
            Rb, spec);
        const double tail = numerics::integrate_halfline(
                                [&](double s) {
                                    const double r = Rb + s;
                                    return om * std::pow(r, n - 2) * std::pow(u.value(r, 0.0), sh);
                                },
                                spec, Rb)
                                .value;
        t.trace = (diff - tail) / delta;
        t.curv = boundary_integral([&](double r) { return b.curv(r); }, Rb, spec);
    });
    auto stat = [&](double DirectionalTerms::*field) {
        std::vector<double> xs;
        for (const auto& t : per) xs.push_back(t.*field);
        return numerics::sample_statistics(xs);
    };

    const double H = domain.mean_curvature_origin();
    const double b2 = radial_integral(params, {2, n});
    const double b4 = radial_integral(params, {4, n});
    const double b0 = radial_integral(params, {0, n - 2});
    const double ass = std::pow(al, params.crit_exponent());
    const double ash = std::pow(al, sh);

    std::vector<Comparison> out;
    auto add = [&](const std::string& name, double DirectionalTerms::*field, double ref,
                   const std::string& prov) {
        const auto s = stat(field);
        out.push_back({name, s.mean, s.standard_error, ref, prov});
    };
    add("sigma_crit", &DirectionalTerms::crit, ass * (H / 2.0) * b2,
        "alpha^{2*} (H(0)/2) B(2,n;D)");
    add("sigma_grad", &DirectionalTerms::grad, 0.5 * al * al * (nd - 2.0) * (nd - 2.0) * H * (D * D * b2 + b4),
        "(alpha^2 (n-2)^2 / 2) H(0) (D^2 B(2,n;D) + B(4,n;D))");
    if (n >= 6)
        add("sigma_l2", &DirectionalTerms::l2, 0.5 * al * al * H * radial_integral(params, {2, n - 2}),
            "(alpha^2 / 2) H(0) B(2,n-2;D)");
    add("trace_shift", &DirectionalTerms::trace, -(nd - 1.0) * D * ash * b2 * H,
        "-(n-1) D alpha^{2#} B(2,n;D) H(0)");
    add("curv_trace", &DirectionalTerms::curv, al * al * H * b0, "alpha^2 H(0) B(0,n-2;D)");
    return out;
}

// ---------------------------------------------------------------------------

std::vector<double> default_delta_grid(int count, double lo, double hi) {
    if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw ValidationError("invalid delta grid");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, i / (count - 1.0));
    out.back() = hi;
    return out;
}

const TermFit& ExpansionResult::term(const std::string& name) const {
    for (const auto& t : terms)
        if (t.name == name) return t;
    throw std::out_of_range("no fitted term named " + name);
}

namespace {

void check_delta_grid(const std::vector<double>& deltas) {
    if (deltas.size() < 5) throw ValidationError("need at least 5 delta values");
    for (double d : deltas)
        if (!(d >= 1e-3 * (1 - 1e-12) && d <= 1e-2 * (1 + 1e-12)))
            throw ValidationError("delta values must lie in [1e-3, 1e-2]");
}

}  // namespace

ExpansionResult expansion_fit(const ProblemParams& params, const ModelDomain& domain,
                              const std::vector<double>& deltas, const QuadratureSpec& spec,
                              EnergyMethod method, int threads) {
    params.validate();
    if (params.n < 6) throw DomainError("expansion_fit: n must be >= 6");
    domain.validate();
    check_delta_grid(deltas);
    use_radial(domain, method);  // rejects radial with unequal curvatures up front

    ExpansionResult res;
    res.deltas = deltas;
    res.table.resize(deltas.size());
    // Fan out over delta; each evaluation stays single threaded.
    numerics::parallel_for(static_cast<int>(deltas.size()), threads, [&](int i) {
        const auto k = static_cast<std::size_t>(i);
        res.table[k] = energy_terms_impl(params, domain, {deltas[k], {}}, spec, method, 1);
    });

    const int n = params.n;
    const double nd = n, D = params.D;
    const double al = alpha(n);
    const double H = domain.mean_curvature_origin();
    const double b2 = radial_integral(params, {2, n});
    const double b4 = radial_integral(params, {4, n});
    const double b0 = radial_integral(params, {0, n - 2});
    const double ass = std::pow(al, params.crit_exponent());
    const double ash = std::pow(al, params.trace_exponent());
    const double grad_sq = bubble_norm(params, NormKind::grad_sq, spec);
    const double crit_volume = bubble_norm(params, NormKind::crit_volume, spec);
    const double crit_trace = bubble_norm(params, NormKind::crit_trace, spec);
    const double l2_volume = bubble_norm(params, NormKind::l2_volume, spec);
    res.h0 = H;
    res.energy_constant = bubble_energy_constant(params, spec);

    auto fit = [&](const std::string& name, const std::function<double(const EnergyBreakdown&)>& g,
                   double ref0, double ref1, const std::string& prov) {
        TermFit t;
        t.name = name;
        for (const auto& e : res.table) t.values.push_back(g(e));
        t.fit = numerics::fit_polynomial(res.deltas, t.values, 2);
        t.intercept = t.fit.coefficients[0];
        t.slope = t.fit.coefficients[1];
        t.reference_intercept = ref0;
        t.reference_slope = ref1;
        t.provenance = prov;
        res.terms.push_back(std::move(t));
    };
    const double r1 = -(nd - 1.0) * (nd - 2.0) * al * al * H * (D * D * b2 + b4);
    const double r3 = -ass * ((nd - 2.0) / (4.0 * nd)) * b2 * H;
    const double r4 = (nd - 2.0) * std::sqrt((nd - 1.0) / nd) * ash * D * D * b2 * H;
    const double r5 = (nd - 1.0) * al * al * b0 * H;
    fit("e1", [](const EnergyBreakdown& e) { return e.e1; }, 2.0 * (nd - 1.0) / (nd - 2.0) * grad_sq, r1,
        "slope -(n-1)(n-2) alpha^2 H(0) (D^2 B(2,n;D) + B(4,n;D))");
    fit("e3", [](const EnergyBreakdown& e) { return e.e3; }, (nd - 2.0) / (2.0 * nd) * crit_volume, r3,
        "slope -alpha^{2*} ((n-2)/(4n)) B(2,n;D) H(0)");
    fit("e4", [](const EnergyBreakdown& e) { return e.e4; },
        -(nd - 2.0) * D / std::sqrt(nd * (nd - 1.0)) * crit_trace, r4,
        "slope (n-2) sqrt((n-1)/n) alpha^{2#} D^2 B(2,n;D) H(0)");
    fit("e5", [](const EnergyBreakdown& e) { return e.e5; }, 0.0, r5,
        "slope (n-1) alpha^2 B(0,n-2;D) H(0)");
    fit("aggregate", [](const EnergyBreakdown& e) { return e.mu_free(); }, res.energy_constant,
        r1 + r3 + r4 + r5, "slope C_n(D) H(0), the sum of the four term slopes");
    fit("e2_ratio", [](const EnergyBreakdown& e) { return e.e2_coeff / (e.delta * e.delta); },
        0.5 * l2_volume, -0.25 * al * al * H * radial_integral(params, {2, n - 2}),
        "intercept (1/2) int U_1^2; slope -(alpha^2/4) H(0) B(2,n-2;D)");
    res.slope_scale = std::abs(r1) + std::abs(r3) + std::abs(r4) + std::abs(r5);
    return res;
}

// ---------------------------------------------------------------------------
// Residual norms, computed in unscaled coordinates.

namespace {

struct ScaledBubble {
    int n;
    double D, delta, amp;
    double q(double r, double xn) const {
        const double s = xn + delta * D;
        return r * r + s * s - delta * delta;
    }
    double value(double r, double xn) const { return amp * std::pow(q(r, xn), -(n - 2) / 2.0); }
    double d_r(double r, double xn) const { return -amp * (n - 2.0) * r * std::pow(q(r, xn), -n / 2.0); }
    double d_n(double r, double xn) const {
        return -amp * (n - 2.0) * (xn + delta * D) * std::pow(q(r, xn), -n / 2.0);
    }
};

}  // namespace

namespace {

ResidualNorms residual_norms_impl(const ProblemParams& params, const ModelDomain& domain,
                                  const BubbleParams& bp, const QuadratureSpec& spec,
                                  EnergyMethod method, int threads) {
    check_inputs(params, domain, bp, spec);
    const int n = params.n;
    if (n < 6) throw DomainError("residual_norm_components: n must be >= 6");
    const double nd = n, D = params.D;
    const double delta = bp.delta, rho = domain.rho;
    const ScaledBubble U{n, D, delta, alpha(n) * std::pow(delta, (nd - 2.0) / 2.0)};
    const auto chi = CutoffProfile::for_radius(rho);
    const double om = omega(n - 2);
    const double q = 2.0 * nd / (nd + 2.0);
    const double qb = 2.0 * (nd - 1.0) / nd;
    const double p = (nd + 2.0) / (nd - 2.0);
    const double c = 4.0 * (nd - 1.0) / (nd - 2.0);
    const double cb = D / std::sqrt(nd * (nd - 1.0));
    const double sk = sum_curvatures(domain);
    const auto bps = with(numerics::geometric_breakpoints(0.0, rho, delta), {rho / 2.0});

    const auto dirs = directions(domain, method, spec);
    struct Parts {
        double w = 0, in = 0, bd = 0, hw = 0;
    };
    std::vector<Parts> per(dirs.size());
    numerics::parallel_for(static_cast<int>(dirs.size()), threads, [&](int i) {
        const Direction& d = dirs[static_cast<std::size_t>(i)];
        Parts& out = per[static_cast<std::size_t>(i)];
        const double rmax = graph_radius(domain, d.kappa);
        auto lo = [&](double r) { return d.kappa * r * r; };
        auto hi = [&](double) { return rho; };

        out.w = numerics::integrate_2d(
                    [&](double r, double xn) {
                        const double w = chi.s(r) * chi.s(xn) * U.value(r, xn);
                        return om * std::pow(r, n - 2) * std::pow(w, q);
                    },
                    0.0, rmax, lo, hi, spec, bps, bps)
                    .value;

        // The interior residual lives where chi < 1, outside C(rho/2).
        out.in = numerics::integrate_2d(
                     [&](double r, double xn) {
                         const auto cr = chi.radial(r, xn, n);
                         if (cr.value == 1.0 && cr.d_r == 0.0 && cr.d_n == 0.0 && cr.laplacian == 0.0)
                             return 0.0;
                         const double u = U.value(r, xn);
                         const double g =
                             -c * (cr.laplacian * u + 2.0 * (cr.d_r * U.d_r(r, xn) + cr.d_n * U.d_n(r, xn))) +
                             std::pow(u, p) * (std::pow(cr.value, p) - cr.value);
                         return om * std::pow(r, n - 2) * std::pow(std::abs(g), q);
                     },
                     0.0, rmax, [&](double r) { return r < rho / 2.0 ? std::max(lo(r), rho / 2.0) : lo(r); },
                     hi, spec, bps, bps)
                     .value;

        auto graph = [&](double r, bool curvature) {
            const double xn = lo(r);
            const double J = std::sqrt(1.0 + 4.0 * d.kappa2 * r * r);
            const auto cr = chi.radial(r, xn, n);
            const double u = U.value(r, xn);
            const double w = cr.value * u;
            double g;
            if (curvature) {
                g = mean_curvature_ray(n, sk, d.kappa2, d.kappa3, r) * w;
            } else {
                const double wr = cr.d_r * u + cr.value * U.d_r(r, xn);
                const double wn = cr.d_n * u + cr.value * U.d_n(r, xn);
                const double dnu = (2.0 * d.kappa * r * wr - wn) / J;
                g = 2.0 / (nd - 2.0) * dnu - cb * std::pow(w, nd / (nd - 2.0));
            }
            return om * std::pow(r, n - 2) * std::pow(std::abs(g), qb) * J;
        };
        out.bd = numerics::integrate([&](double r) { return graph(r, false); }, 0.0, rmax, spec, bps).value;
        out.hw = numerics::integrate([&](double r) { return graph(r, true); }, 0.0, rmax, spec, bps).value;
    });

    auto mean = [&](double Parts::*f) {
        double s = 0.0;
        for (const auto& x : per) s += x.*f;
        return s / static_cast<double>(per.size());
    };
    ResidualNorms r;
    r.delta = delta;
    r.w_norm = std::pow(mean(&Parts::w), 1.0 / q);
    r.interior = std::pow(mean(&Parts::in), 1.0 / q);
    r.boundary = std::pow(mean(&Parts::bd), 1.0 / qb);
    r.hw = std::pow(mean(&Parts::hw), 1.0 / qb);
    r.directions = static_cast<int>(dirs.size());
    return r;
}

}  // namespace

ResidualNorms residual_norm_components(const ProblemParams& params, const ModelDomain& domain,
                                       const BubbleParams& bp, const QuadratureSpec& spec,
                                       EnergyMethod method) {
    return residual_norms_impl(params, domain, bp, spec, method, numerics::default_thread_count());
}

ResidualSlopes residual_norm_slopes(const ProblemParams& params, const ModelDomain& domain,
                                    const std::vector<double>& deltas, const QuadratureSpec& spec,
                                    EnergyMethod method, int threads) {
    params.validate();
    if (params.n < 6) throw DomainError("residual_norm_slopes: n must be >= 6");
    domain.validate();
    check_delta_grid(deltas);
    use_radial(domain, method);

    ResidualSlopes res;
    res.deltas = deltas;
    res.table.resize(deltas.size());
    numerics::parallel_for(static_cast<int>(deltas.size()), threads, [&](int i) {
        const auto k = static_cast<std::size_t>(i);
        res.table[k] = residual_norms_impl(params, domain, {deltas[k], {}}, spec, method, 1);
    });

    const double nd = params.n;
    const bool log_factor = params.n == 6;
    std::vector<double> logd;
    for (double d : deltas) logd.push_back(std::log(d));
    const std::vector<std::function<double(double)>> basis{
        [](double) { return 1.0; }, [](double x) { return x; }, [](double x) { return std::exp(x); }};

    auto slope = [&](const std::string& name, double ResidualNorms::*f, double target, bool divide_log) {
        SlopeFit s;
        s.name = name;
        s.target = target;
        s.certified = !divide_log;
        std::vector<double> logv;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            double v = res.table[i].*f;
            if (divide_log) v /= std::pow(std::abs(logd[i]), 2.0 / 3.0);
            s.values.push_back(v);
            logv.push_back(std::log(v));
        }
        s.fit = numerics::fit_linear_model(logd, logv, basis);
        s.slope = s.fit.coefficients[1];
        s.plain_slope = numerics::fit_loglog(deltas, s.values).coefficients[1];
        res.slopes.push_back(std::move(s));
    };
    slope("w_norm", &ResidualNorms::w_norm, 2.0, log_factor);
    slope("interior", &ResidualNorms::interior, (nd - 2.0) / 2.0, false);
    slope("boundary", &ResidualNorms::boundary, (nd - 2.0) / 2.0, false);
    slope("hw", &ResidualNorms::hw, 1.0, false);
    return res;
}

std::string to_string(EnergyMethod method) {
    switch (method) {
        case EnergyMethod::automatic: return "auto";
        case EnergyMethod::radial: return "radial";
        case EnergyMethod::monte_carlo: return "monte-carlo";
    }
    return "auto";
}

EnergyMethod energy_method_from_string(const std::string& name) {
    if (name == "auto") return EnergyMethod::automatic;
    if (name == "radial") return EnergyMethod::radial;
    if (name == "monte-carlo" || name == "mc") return EnergyMethod::monte_carlo;
    throw ValidationError("unknown energy method '" + name + "' (auto, radial, monte-carlo)");
}

}  // namespace blowup
