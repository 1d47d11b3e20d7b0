#include "blowup/reduction.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "blowup/errors.hpp"

namespace blowup {

CnTerms c_n_terms(const ProblemParams& params) {
    params.validate();
    if (params.n < 5) throw DomainError("C_n: n must be >= 5");
    const int n = params.n;
    const double nd = n, D = params.D;
    const double al = alpha(n);
    const double a2 = al * al;
    const double b2 = radial_integral(params, {2, n});
    const double b4 = radial_integral(params, {4, n});
    const double b0 = radial_integral(params, {0, n - 2});
    CnTerms t;
    t.terms[0] = -(nd - 1.0) * (nd - 2.0) * a2 * (D * D * b2 + b4);
    t.terms[1] = -std::pow(al, params.crit_exponent()) * ((nd - 2.0) / (4.0 * nd)) * b2;
    t.terms[2] = (nd - 2.0) * std::sqrt((nd - 1.0) / nd) * std::pow(al, params.trace_exponent()) * D * D * b2;
    t.terms[3] = (nd - 1.0) * a2 * b0;
    for (double v : t.terms) {
        t.value += v;
        t.scale += std::abs(v);
    }
    t.degenerate = std::abs(t.value) <= kZeroTolerance * t.scale;
    return t;
}

double c_n(const ProblemParams& params) { return c_n_terms(params).value; }

namespace {

ScanPoint scan_point(int n, double D) {
    const auto t = c_n_terms({n, D});
    return {D, t.value, t.sign()};
}

}  // namespace

std::vector<ScanPoint> c_n_scan(int n, double d_min, double d_max, int steps) {
    if (steps < 2) throw ValidationError("steps must be >= 2");
    if (!(d_min > 1.0) || !(d_max > d_min)) throw ValidationError("need 1 < D_min < D_max");
    std::vector<ScanPoint> out;
    for (int i = 0; i < steps; ++i)
        out.push_back(scan_point(n, i + 1 == steps ? d_max : d_min + (d_max - d_min) * i / (steps - 1.0)));
    return out;
}

std::vector<ScanPoint> c_n_scan_log(int n, double d_min, double d_max, int steps) {
    if (steps < 2) throw ValidationError("steps must be >= 2");
    if (!(d_min > 1.0) || !(d_max > d_min)) throw ValidationError("need 1 < D_min < D_max");
    const double lo = std::log(d_min - 1.0), hi = std::log(d_max - 1.0);
    std::vector<ScanPoint> out;
    for (int i = 0; i < steps; ++i)
        out.push_back(scan_point(n, i + 1 == steps ? d_max : 1.0 + std::exp(lo + (hi - lo) * i / (steps - 1.0))));
    return out;
}

int sign_changes(const std::vector<ScanPoint>& scan) {
    int changes = 0, last = 0;
    for (const auto& p : scan) {
        if (p.sign == 0) continue;
        if (last != 0 && p.sign != last) ++changes;
        last = p.sign;
    }
    return changes;
}

double predicted_root(int n) { return std::sqrt((n + 1.0) / (n - 1.0)); }

double c_n_root(int n, double tol) {
    if (n < 6) throw DomainError("c_n_root: n must be >= 6");
    if (!(tol > 0.0)) throw ValidationError("tol must be > 0");
    const double lo = 1.0 + 1e-3, hi = 10.0;
    // Bracket on a log grid in D - 1 so the steep end near D = 1 is resolved.
    const auto grid = c_n_scan_log(n, lo, hi, 400);
    const ScanPoint* a = nullptr;
    const ScanPoint* b = nullptr;
    int degenerate = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].sign == 0) {
            ++degenerate;
            continue;
        }
        if (a && a->sign != grid[i].sign) {
            b = &grid[i];
            break;
        }
        a = &grid[i];
    }
    if (!b) {
        if (degenerate == static_cast<int>(grid.size()))
            throw NoSignChange("C_n is zero to rounding at every D in (1, 10]: no sign change to bracket");
        throw NoSignChange("C_n keeps one sign on (1, 10]");
    }
    const double root = numerics::find_root_bracketed([n](double D) { return c_n({n, D}); }, a->D, b->D, tol);
    const auto tail = c_n_scan_log(n, root + 1e-6, 1e3, 400);
    if (sign_changes(tail) > 0) throw MultipleRoots("C_n changes sign again beyond D = " + std::to_string(root));
    return root;
}

AsymptoticResult c_n_asymptotics(int n, AsymptoticRegime regime) {
    if (n < 6) throw DomainError("c_n_asymptotics: n must be >= 6");
    AsymptoticResult r;
    r.regime = regime;
    r.target_slope = -n / 2.0;
    if (regime == AsymptoticRegime::near_one) {
        std::vector<double> x, y;
        for (double e : {1e-4, 1e-5, 1e-6}) {
            const auto t = c_n_terms({n, 1.0 + e});
            r.D.push_back(1.0 + e);
            r.values.push_back(t.value);
            if (t.degenerate || !(t.value > 0.0))
                throw NonConvergence("C_n at D - 1 = " + std::to_string(e) +
                                     (t.degenerate ? " is zero to rounding" : " is not positive") +
                                     "; the log-log slope is undefined");
            x.push_back(e);
            y.push_back(t.value);
        }
        r.fit = numerics::fit_loglog(x, y);
        r.slope = r.fit.coefficients[1];
        return r;
    }
    for (double D : {1e2, 1e3, 1e4}) {
        const auto t = c_n_terms({n, D});
        r.D.push_back(D);
        const double ratio = t.value * std::pow(D * D - 1.0, n / 2.0) / (D * D * D);
        r.values.push_back(ratio);
        if (t.degenerate)
            throw NonConvergence("C_n at D = " + std::to_string(D) + " is zero to rounding; the ratio has no limit");
    }
    r.estimate = r.values.back();
    r.last_decade_change = std::abs(r.values[2] / r.values[1] - 1.0);
    if (r.last_decade_change > 0.01)
        throw NonConvergence("C_n (D^2-1)^{n/2} / D^3 changes by " + std::to_string(r.last_decade_change) +
                             " between D = 1e3 and 1e4");
    return r;
}

// ---------------------------------------------------------------------------

void CriticalPointModel::validate(int n) const {
    const auto m = static_cast<std::size_t>(n - 1);
    if (p.size() != m) throw ValidationError("p must have n-1 components");
    if (hess.size() != m * m) throw ValidationError("hess must be (n-1) x (n-1)");
    Eigen::MatrixXd A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hess[i * m + j];
    if ((A - A.transpose()).norm() > 1e-12 * std::max(1.0, A.norm())) throw ValidationError("hess must be symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const double smallest = es.eigenvalues().cwiseAbs().minCoeff();
    if (!(smallest > 1e-12 * std::max(1.0, A.norm()))) throw ValidationError("hess is degenerate");
    if (!std::isfinite(H0)) throw ValidationError("H0 must be finite");
}

double CriticalPointModel::H(const std::vector<double>& xi) const {
    const std::size_t m = p.size();
    double q = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) q += (xi[i] - p[i]) * hess[i * m + j] * (xi[j] - p[j]);
    return H0 + 0.5 * q;
}

std::vector<double> CriticalPointModel::grad_H(const std::vector<double>& xi) const {
    const std::size_t m = p.size();
    std::vector<double> g(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) g[i] += hess[i * m + j] * (xi[j] - p[j]);
    return g;
}

CriticalPointModel default_model(int n, double H0) {
    const auto m = static_cast<std::size_t>(n - 1);
    CriticalPointModel c{H0, std::vector<double>(m * m, 0.0), std::vector<double>(m, 0.0)};
    for (std::size_t i = 0; i < m; ++i) c.hess[i * m + i] = -1.0;
    return c;
}

void ReducedEnergyParams::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be > 0");
    if (!(d_min > 0.0) || !(d_max > d_min)) throw ValidationError("need 0 < d_min < d_max");
}

ReducedConstants reduced_constants(const ProblemParams& params) {
    return {bubble_energy_constant(params), c_n(params), bubble_norm(params, NormKind::l2_volume)};
}

namespace {
void check_point(const CriticalPointModel& model, double d, const std::vector<double>& xi) {
    if (!(d > 0.0)) throw ValidationError("d must be > 0");
    if (xi.size() != model.p.size()) throw ValidationError("xi must have n-1 components");
}
}  // namespace

double reduced_energy(const ReducedConstants& k, const CriticalPointModel& model,
                      const ReducedEnergyParams& rp, double d, const std::vector<double>& xi) {
    check_point(model, d, xi);
    return k.energy0 + (k.cn * model.H(xi) * d + 0.5 * d * d * k.l2) / rp.mu;
}

std::vector<double> reduced_gradient(const ReducedConstants& k, const CriticalPointModel& model,
                                     const ReducedEnergyParams& rp, double d,
                                     const std::vector<double>& xi) {
    check_point(model, d, xi);
    std::vector<double> g{(k.cn * model.H(xi) + d * k.l2) / rp.mu};
    for (double v : model.grad_H(xi)) g.push_back(k.cn * d * v / rp.mu);
    return g;
}

double reduced_energy(const ProblemParams& params, const CriticalPointModel& model,
                      const ReducedEnergyParams& rp, double d, const std::vector<double>& xi) {
    return reduced_energy(reduced_constants(params), model, rp, d, xi);
}

std::vector<double> reduced_gradient(const ProblemParams& params, const CriticalPointModel& model,
                                     const ReducedEnergyParams& rp, double d,
                                     const std::vector<double>& xi) {
    return reduced_gradient(reduced_constants(params), model, rp, d, xi);
}

ClosedFormCritical closed_form_critical(const ProblemParams& params, const CriticalPointModel& model) {
    const auto t = c_n_terms(params);
    const double l2 = bubble_norm(params, NormKind::l2_volume);
    return {t.degenerate ? 0.0 : -t.value * model.H0 / l2, t.degenerate};
}

CriticalPointResult solve_critical_point(const ReducedConstants& k, const CriticalPointModel& model,
                                         const ReducedEnergyParams& rp, double newton_tol, double d0,
                                         double xi_offset) {
    rp.validate();
    if (!(newton_tol > 0.0)) throw ValidationError("newton_tol must be > 0");
    const int n = static_cast<int>(model.p.size()) + 1;
    model.validate(n);
    if (!(model.H0 > 0.0)) throw RegimeError("H0 <= 0: no positive-d critical point at leading order");
    if (!(k.cn < 0.0)) throw RegimeError("C_n(D) >= 0: no positive-d critical point at leading order");
    if (!(d0 > 0.0)) throw ValidationError("d0 must be > 0");

    const auto N = static_cast<Eigen::Index>(n);
    const std::size_t m = model.p.size();
    auto jacobian = [&](double d, const std::vector<double>& xi) {
        Eigen::MatrixXd J(N, N);
        const auto g = model.grad_H(xi);
        J(0, 0) = k.l2;
        for (std::size_t i = 0; i < m; ++i) {
            const auto I = static_cast<Eigen::Index>(i + 1);
            J(0, I) = J(I, 0) = k.cn * g[i];
            for (std::size_t j = 0; j < m; ++j)
                J(I, static_cast<Eigen::Index>(j + 1)) = k.cn * d * model.hess[i * m + j];
        }
        return Eigen::MatrixXd(J / rp.mu);
    };
    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };

    CriticalPointResult res;
    res.d = d0;
    res.xi = model.p;
    for (auto& x : res.xi) x += xi_offset;
    res.d_closed_form = -k.cn * model.H0 / k.l2;
    for (int it = 0;; ++it) {
        const auto g = reduced_gradient(k, model, rp, res.d, res.xi);
        res.gradient_norm = norm(g);
        res.iterations = it;
        if (res.gradient_norm <= newton_tol) break;
        if (it >= 50) throw NonConvergence("Newton did not reach the gradient tolerance in 50 iterations");
        Eigen::VectorXd rhs(N);
        for (Eigen::Index i = 0; i < N; ++i) rhs(i) = g[static_cast<std::size_t>(i)];
        const Eigen::VectorXd step = jacobian(res.d, res.xi).fullPivLu().solve(rhs);
        if (!step.allFinite()) throw NonConvergence("singular Newton system");
        res.d -= step(0);
        for (std::size_t i = 0; i < m; ++i) res.xi[i] -= step(static_cast<Eigen::Index>(i + 1));
        if (!(res.d > 0.0)) throw NonConvergence("Newton iterate left the region d > 0");
    }
    const Eigen::MatrixXd Hs = jacobian(res.d, res.xi);
    res.hessian.assign(static_cast<std::size_t>(N * N), 0.0);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) res.hessian[static_cast<std::size_t>(i * N + j)] = Hs(i, j);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs);
    for (Eigen::Index i = 0; i < N; ++i) {
        if (es.eigenvalues()(i) > 0.0) ++res.positive_eigenvalues;
        if (es.eigenvalues()(i) < 0.0) ++res.negative_eigenvalues;
    }
    return res;
}

CriticalPointResult solve_critical_point(const ProblemParams& params, const CriticalPointModel& model,
                                         const ReducedEnergyParams& rp, double newton_tol, double d0,
                                         double xi_offset) {
    params.validate();
    const auto t = c_n_terms(params);
    if (t.degenerate)
        throw RegimeError("C_n(D) is zero to rounding (|C_n| <= 1e-9 of its summands): no positive-d critical point");
    ReducedConstants k{bubble_energy_constant(params), t.value, bubble_norm(params, NormKind::l2_volume)};
    return solve_critical_point(k, model, rp, newton_tol, d0, xi_offset);
}

std::string to_string(AsymptoticRegime regime) {
    return regime == AsymptoticRegime::near_one ? "near-one" : "infinity";
}

AsymptoticRegime regime_from_string(const std::string& name) {
    if (name == "near-one" || name == "near_one") return AsymptoticRegime::near_one;
    if (name == "infinity") return AsymptoticRegime::infinity;
    throw ValidationError("unknown regime '" + name + "' (near-one, infinity)");
}

}  // namespace blowup
