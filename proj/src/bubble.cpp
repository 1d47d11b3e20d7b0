#include "blowup/bubble.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/numerics.hpp"

namespace blowup {

void BubbleParams::validate(int n) const {
    if (!std::isfinite(delta) || !(delta > 0.0)) throw ValidationError("delta must be > 0");
    if (!xi.empty() && static_cast<int>(xi.size()) != n - 1)
        throw ValidationError("xi must have n-1 components");
    for (double v : xi)
        if (!std::isfinite(v)) throw ValidationError("xi must be finite");
}

namespace {

// Derivatives of v = L(y) Q^{-s} with L = c0 + b.y + q|y|^2 and
// Q = |y|^2 - b2, where y = x - (xi, -delta D) and b2 = delta^2.
struct RationalField {
    double c0 = 0.0;
    std::vector<double> b;  // empty means zero
    double q = 0.0;
    double s = 0.0;
    double b2 = 1.0;

    FieldDerivs eval(std::span<const double> y) const {
        const std::size_t n = y.size();
        double y2 = 0.0, by = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y2 += y[i] * y[i];
            if (!b.empty()) by += b[i] * y[i];
        }
        const double Q = y2 - b2;
        if (!(Q > 0.0)) throw DomainError("bubble denominator is not positive");
        const double L = c0 + by + q * y2;
        const double Qs = std::pow(Q, -s);
        const double Qs1 = Qs / Q;
        const double Qs2 = Qs1 / Q;

        FieldDerivs d;
        d.value = L * Qs;
        d.grad.resize(n);
        double gLy = 0.0;  // grad L . y
        for (std::size_t i = 0; i < n; ++i) {
            const double gL = (b.empty() ? 0.0 : b[i]) + 2.0 * q * y[i];
            gLy += gL * y[i];
            d.grad[i] = gL * Qs - 2.0 * s * L * y[i] * Qs1;
        }
        const double lapL = 2.0 * q * static_cast<double>(n);
        // Lap Q^{-s} = -2s Q^{-s-2} [ (n - 2s - 2) Q - 2 (s+1) b2 ], written
        // without the |y|^2 = Q + b2 cancellation.
        const double t1 = lapL * Qs;
        const double t2 = -4.0 * s * gLy * Qs1;
        const double t3a = -2.0 * s * L * Qs2 * (static_cast<double>(n) - 2.0 * s - 2.0) * Q;
        const double t3b = 4.0 * s * (s + 1.0) * L * b2 * Qs2;
        d.laplacian = t1 + t2 + t3a + t3b;
        d.laplacian_scale = std::abs(t1) + std::abs(t2) + std::abs(t3a) + std::abs(t3b);
        return d;
    }
};

std::vector<double> shifted(const ProblemParams& p, const BubbleParams& bp,
                            std::span<const double> x) {
    if (static_cast<int>(x.size()) != p.n) throw ValidationError("point must have n components");
    std::vector<double> y(x.begin(), x.end());
    if (!bp.xi.empty())
        for (int i = 0; i + 1 < p.n; ++i) y[static_cast<std::size_t>(i)] -= bp.xi[static_cast<std::size_t>(i)];
    y.back() += bp.delta * p.D;
    return y;
}

void require_half_space(std::span<const double> x) {
    if (x.back() < 0.0) throw DomainError("point lies outside the half space (x_n < 0)");
}

double laplace_coeff(int n) { return 4.0 * (n - 1.0) / (n - 2.0); }

}  // namespace

Bubble::Bubble(const ProblemParams& params, const BubbleParams& bp, double alpha_scale)
    : params_(params), bp_(bp) {
    params_.validate();
    bp_.validate(params_.n);
    if (bp_.xi.empty()) bp_.xi.assign(static_cast<std::size_t>(params_.n - 1), 0.0);
    amplitude_ = alpha(params_.n) * alpha_scale * std::pow(bp_.delta, (params_.n - 2.0) / 2.0);
}

FieldDerivs Bubble::derivs(std::span<const double> x) const {
    require_half_space(x);
    RationalField f;
    f.c0 = amplitude_;
    f.s = (params_.n - 2.0) / 2.0;
    f.b2 = bp_.delta * bp_.delta;
    return f.eval(shifted(params_, bp_, x));
}

double Bubble::eval_unchecked(std::span<const double> x) const {
    const auto y = shifted(params_, bp_, x);
    double y2 = 0.0;
    for (double v : y) y2 += v * v;
    const double Q = y2 - bp_.delta * bp_.delta;
    if (!(Q > 0.0)) throw DomainError("bubble denominator is not positive");
    return amplitude_ * std::pow(Q, -(params_.n - 2.0) / 2.0);
}

double Bubble::eval(std::span<const double> x) const {
    require_half_space(x);
    return eval_unchecked(x);
}

std::vector<double> Bubble::grad(std::span<const double> x) const { return derivs(x).grad; }

double Bubble::laplacian(std::span<const double> x) const { return derivs(x).laplacian; }

Residual Bubble::interior_residual(std::span<const double> x) const {
    const auto d = derivs(x);
    const double c = laplace_coeff(params_.n);
    const double nonlin = std::pow(d.value, (params_.n + 2.0) / (params_.n - 2.0));
    return {-c * d.laplacian + nonlin, c * d.laplacian_scale + nonlin};
}

Residual Bubble::interior_residual_fd(std::span<const double> x, double h) const {
    require_half_space(x);
    const double u = eval(x);
    const double lap = numerics::fd_laplacian(
        [this](std::span<const double> p) { return eval_unchecked(p); }, x, h);
    const double c = laplace_coeff(params_.n);
    const double nonlin = std::pow(u, (params_.n + 2.0) / (params_.n - 2.0));
    return {-c * lap + nonlin, std::abs(c * lap) + nonlin};
}

Residual Bubble::boundary_residual(std::span<const double> xbar) const {
    if (static_cast<int>(xbar.size()) != params_.n - 1)
        throw ValidationError("boundary point must have n-1 components");
    std::vector<double> x(xbar.begin(), xbar.end());
    x.push_back(0.0);
    const auto d = derivs(x);
    const double n = params_.n;
    const double flux = 2.0 / (n - 2.0) * (-d.grad.back());
    const double rhs = params_.D / std::sqrt(n * (n - 1.0)) * std::pow(d.value, n / (n - 2.0));
    return {flux - rhs, std::abs(flux) + std::abs(rhs)};
}

double bubble_eval(const ProblemParams& params, const BubbleParams& bp, std::span<const double> x) {
    return Bubble(params, bp).eval(x);
}

std::vector<double> bubble_grad(const ProblemParams& params, const BubbleParams& bp,
                                std::span<const double> x) {
    return Bubble(params, bp).grad(x);
}

double bubble_laplacian(const ProblemParams& params, const BubbleParams& bp,
                        std::span<const double> x) {
    return Bubble(params, bp).laplacian(x);
}

Residual boundary_residual(const ProblemParams& params, const BubbleParams& bp,
                           std::span<const double> xbar) {
    return Bubble(params, bp).boundary_residual(xbar);
}

// ---------------------------------------------------------------------------

FieldDerivs kernel_derivs(const ProblemParams& params, int j, std::span<const double> x) {
    params.validate();
    const int n = params.n;
    if (j < 1 || j > n) throw ValidationError("kernel index j must lie in 1..n");
    if (static_cast<int>(x.size()) != n) throw ValidationError("point must have n components");
    require_half_space(x);
    const double al = alpha(n);
    RationalField f;
    f.s = n / 2.0;
    f.b2 = 1.0;
    f.b.assign(static_cast<std::size_t>(n), 0.0);
    if (j < n) {
        // x_j = y_j for tangential directions.
        f.b[static_cast<std::size_t>(j - 1)] = al * (2.0 - n);
    } else {
        // |x|^2 + 1 - D^2 = |y|^2 - 2 D y_n + 1.
        const double pre = al * (n - 2.0) / 2.0;
        f.c0 = pre;
        f.b.back() = -2.0 * params.D * pre;
        f.q = pre;
    }
    BubbleParams unit;
    return f.eval(shifted(params, unit, x));
}

double kernel_eval(const ProblemParams& params, int j, std::span<const double> x) {
    return kernel_derivs(params, j, x).value;
}

Residual linearized_residual(const ProblemParams& params, int j, std::span<const double> point,
                             Where where, bool use_bubble) {
    params.validate();
    const int n = params.n;
    const double nd = n;
    std::vector<double> x(point.begin(), point.end());
    if (where == Where::boundary) {
        if (static_cast<int>(x.size()) != n - 1)
            throw ValidationError("boundary point must have n-1 components");
        x.push_back(0.0);
    }
    const Bubble U(params, {});
    const double u = U.eval(x);
    const FieldDerivs v = use_bubble ? U.derivs(x) : kernel_derivs(params, j, x);
    if (where == Where::interior) {
        const double c = laplace_coeff(n);
        const double lin = (nd + 2.0) / (nd - 2.0) * std::pow(u, 4.0 / (nd - 2.0)) * v.value;
        return {-c * v.laplacian + lin, c * v.laplacian_scale + std::abs(lin)};
    }
    const double flux = 2.0 / (nd - 2.0) * (-v.grad.back());
    const double lin =
        params.D / (nd - 2.0) * std::sqrt(nd / (nd - 1.0)) * std::pow(u, 2.0 / (nd - 2.0)) * v.value;
    return {flux - lin, std::abs(flux) + std::abs(lin)};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> random_point(numerics::Rng& rng, int n, double spread) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i + 1 < n; ++i) x[static_cast<std::size_t>(i)] = spread * rng.normal();
    x.back() = 3.0 * spread * rng.uniform();
    return x;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

}  // namespace

BubbleCheck verify_bubble(const ProblemParams& params, int points, std::uint64_t seed, double h) {
    params.validate();
    if (points < 1) throw ValidationError("points must be >= 1");
    if (!(h > 0.0)) throw ValidationError("h must be > 0");
    numerics::Rng rng(seed);
    BubbleCheck out;
    out.points = points;
    const int n = params.n;
    for (int i = 0; i < points; ++i) {
        BubbleParams bp;
        bp.delta = std::exp(std::log(0.5) + std::log(4.0) * rng.uniform());
        bp.xi.resize(static_cast<std::size_t>(n - 1));
        for (auto& c : bp.xi) c = 2.0 * rng.uniform() - 1.0;
        const Bubble U(params, bp);
        auto x = random_point(rng, n, 1.5 * bp.delta);
        for (int k = 0; k + 1 < n; ++k) x[static_cast<std::size_t>(k)] += bp.xi[static_cast<std::size_t>(k)];
        out.max_interior = std::max(out.max_interior, U.interior_residual(x).relative());

        // The fixed-step stencil is only meaningful at unit scale near the
        // core: its roundoff is about eps Q^2 / h^2 relative to Lap U, so the
        // sample keeps Q = O(1).
        const Bubble U1(params, {1.0, bp.xi});
        auto y = random_point(rng, n, 0.35);
        for (int k = 0; k + 1 < n; ++k) y[static_cast<std::size_t>(k)] += bp.xi[static_cast<std::size_t>(k)];
        y.back() += 4.0 * h;
        out.max_interior_fd = std::max(out.max_interior_fd, U1.interior_residual_fd(y, h).relative());
        const auto g = U1.grad(y);
        const auto gfd = numerics::fd_gradient(
            [&U1](std::span<const double> p) { return U1.eval_unchecked(p); }, y, h);
        std::vector<double> diff(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) diff[k] = gfd[k] - g[k];
        out.max_gradient_fd = std::max(out.max_gradient_fd, norm2(diff) / norm2(g));

        std::vector<double> xbar(x.begin(), x.end() - 1);
        out.max_boundary = std::max(out.max_boundary, U.boundary_residual(xbar).relative());
    }
    return out;
}

KernelCheck verify_kernel(const ProblemParams& params, int points, std::uint64_t seed, double h) {
    params.validate();
    if (points < 1) throw ValidationError("points must be >= 1");
    if (!(h > 0.0 && h < 0.5)) throw ValidationError("h must lie in (0, 0.5)");
    numerics::Rng rng(seed);
    KernelCheck out;
    out.points = points;
    const int n = params.n;
    const double al = alpha(n);
    const Bubble up(params, {1.0 + h, {}}), down(params, {1.0 - h, {}});
    for (int i = 0; i < points; ++i) {
        const auto x = random_point(rng, n, 1.5);
        const std::vector<double> xbar(x.begin(), x.end() - 1);
        for (int j = 1; j <= n; ++j) {
            out.max_interior =
                std::max(out.max_interior, linearized_residual(params, j, x, Where::interior).relative());
            out.max_boundary =
                std::max(out.max_boundary, linearized_residual(params, j, xbar, Where::boundary).relative());
        }
        // Relative to the magnitude of the numerator terms, since J_n has a
        // zero set where a plain relative error is meaningless.
        const double fd = (up.eval(x) - down.eval(x)) / (2.0 * h);
        double x2 = 0.0;
        for (double c : x) x2 += c * c;
        const double Q = x2 - x.back() * x.back() + (x.back() + params.D) * (x.back() + params.D) - 1.0;
        const double scale = al * (n - 2.0) / 2.0 * (x2 + 1.0 + params.D * params.D) * std::pow(Q, -n / 2.0);
        out.max_dilation_fd =
            std::max(out.max_dilation_fd, std::abs(fd - kernel_eval(params, n, x)) / scale);
    }
    return out;
}

}  // namespace blowup
