#include "blowup/model_domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {

void ModelDomain::validate() const {
    if (curvatures.empty()) throw ValidationError("curvatures must list k_1..k_{n-1}");
    for (double k : curvatures)
        if (!std::isfinite(k) || k < 0.0) throw ValidationError("curvatures must be finite and >= 0");
    if (!std::isfinite(rho) || !(rho > 0.0)) throw ValidationError("rho must be > 0");
}

bool ModelDomain::equal_curvatures() const {
    return std::all_of(curvatures.begin(), curvatures.end(),
                       [&](double k) { return k == curvatures.front(); });
}

bool ModelDomain::flat() const {
    return std::all_of(curvatures.begin(), curvatures.end(), [](double k) { return k == 0.0; });
}

double ModelDomain::mean_curvature_origin() const {
    double s = 0.0;
    for (double k : curvatures) s += k;
    return 2.0 * s / static_cast<double>(curvatures.size());
}

ModelDomain uniform_domain(int n, double k, double rho) {
    if (n < 2) throw ValidationError("dimension must be >= 2");
    return {std::vector<double>(static_cast<std::size_t>(n - 1), k), rho};
}

namespace {

void check_disc(const ModelDomain& d, std::span<const double> xbar) {
    if (xbar.size() != d.curvatures.size())
        throw ValidationError("xbar must have n-1 = " + std::to_string(d.curvatures.size()) +
                              " components");
    double r2 = 0.0;
    for (double v : xbar) r2 += v * v;
    if (r2 > d.rho * d.rho) throw DomainError("xbar lies outside the patch disc |xbar| <= rho");
}

}  // namespace

double phi(const ModelDomain& domain, std::span<const double> xbar) {
    check_disc(domain, xbar);
    double s = 0.0;
    for (std::size_t i = 0; i < xbar.size(); ++i) s += domain.curvatures[i] * xbar[i] * xbar[i];
    return s;
}

std::vector<double> grad_phi(const ModelDomain& domain, std::span<const double> xbar) {
    check_disc(domain, xbar);
    std::vector<double> g(xbar.size());
    for (std::size_t i = 0; i < xbar.size(); ++i) g[i] = 2.0 * domain.curvatures[i] * xbar[i];
    return g;
}

double mean_curvature(const ModelDomain& domain, std::span<const double> xbar) {
    check_disc(domain, xbar);
    // div(g / W) = tr(Hess phi) / W - g^T Hess g / W^3, with Hess phi = 2K.
    double tr = 0.0, g2 = 0.0, gHg = 0.0;
    for (std::size_t i = 0; i < xbar.size(); ++i) {
        const double k = domain.curvatures[i];
        const double g = 2.0 * k * xbar[i];
        tr += 2.0 * k;
        g2 += g * g;
        gHg += 2.0 * k * g * g;
    }
    const double W = std::sqrt(1.0 + g2);
    return (tr / W - gHg / (W * W * W)) / static_cast<double>(xbar.size());
}

double mean_curvature_ray(int n, double sum_k, double kappa2, double kappa3, double r) {
    const double w2 = 1.0 + 4.0 * kappa2 * r * r;
    const double W = std::sqrt(w2);
    return (2.0 * sum_k / W - 8.0 * kappa3 * r * r / (w2 * W)) / (n - 1.0);
}

double surface_jacobian(const ModelDomain& domain, std::span<const double> xbar) {
    double g2 = 0.0;
    for (double g : grad_phi(domain, xbar)) g2 += g * g;
    return std::sqrt(1.0 + g2);
}

PatchRegion patch_membership(const ModelDomain& domain, std::span<const double> x) {
    if (x.size() != domain.curvatures.size() + 1)
        throw ValidationError("point must have n components");
    const auto xbar = x.first(x.size() - 1);
    const double xn = x.back();
    double r2 = 0.0;
    for (double v : xbar) r2 += v * v;
    if (!(r2 < domain.rho * domain.rho) || !(xn < domain.rho)) return PatchRegion::outside;
    const double h = phi(domain, xbar);
    if (xn >= h) return PatchRegion::omega;
    if (xn > 0.0) return PatchRegion::sigma;
    return PatchRegion::outside;
}

bool sigma_membership(const ModelDomain& domain, std::span<const double> x) {
    return patch_membership(domain, x) == PatchRegion::sigma;
}

// ---------------------------------------------------------------------------

namespace {
// Unit smoothstep S(u) = 10u^3 - 15u^4 + 6u^5 on [0, 1].
double step(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double dstep(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
double d2step(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }
}  // namespace

double CutoffProfile::s(double t) const {
    t = std::abs(t);
    if (t <= inner_radius) return 1.0;
    if (t >= outer_radius) return 0.0;
    // 1 - S(u) = S(1 - u) keeps full relative accuracy as s -> 0.
    const double v = (outer_radius - t) / (outer_radius - inner_radius);
    return std::max(0.0, step(v));
}

double CutoffProfile::ds(double t) const {
    const double sign = t < 0.0 ? -1.0 : 1.0;
    t = std::abs(t);
    if (t <= inner_radius || t >= outer_radius) return 0.0;
    const double w = outer_radius - inner_radius;
    return -sign * dstep((t - inner_radius) / w) / w;
}

double CutoffProfile::d2s(double t) const {
    t = std::abs(t);
    if (t <= inner_radius || t >= outer_radius) return 0.0;
    const double w = outer_radius - inner_radius;
    return -d2step((t - inner_radius) / w) / (w * w);
}

CutoffProfile::Radial CutoffProfile::radial(double r, double xn, int n) const {
    const double sr = s(r), sn = s(xn);
    const double dr = ds(r), dn = ds(xn);
    // d s(r) / dr vanishes near r = 0, so (n-2)/r * s'(r) is safe there.
    const double lap_r = d2s(r) + (r > 0.0 ? (n - 2.0) / r * dr : 0.0);
    return {sr * sn, dr * sn, sr * dn, lap_r * sn + sr * d2s(xn)};
}

double CutoffProfile::value(std::span<const double> x) const {
    double r2 = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) r2 += x[i] * x[i];
    return s(std::sqrt(r2)) * s(x.back());
}

std::vector<double> CutoffProfile::gradient(std::span<const double> x) const {
    double r2 = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) r2 += x[i] * x[i];
    const double r = std::sqrt(r2);
    const auto d = radial(r, x.back(), static_cast<int>(x.size()));
    std::vector<double> g(x.size(), 0.0);
    if (r > 0.0)
        for (std::size_t i = 0; i + 1 < x.size(); ++i) g[i] = d.d_r * x[i] / r;
    g.back() = d.d_n;
    return g;
}

double CutoffProfile::laplacian(std::span<const double> x) const {
    double r2 = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) r2 += x[i] * x[i];
    return radial(std::sqrt(r2), x.back(), static_cast<int>(x.size())).laplacian;
}

CutoffBounds cutoff_bounds(const CutoffProfile& profile, int n, int resolution) {
    if (resolution < 2) throw ValidationError("resolution must be >= 2");
    CutoffBounds out;
    const double R = profile.outer_radius, R0 = profile.inner_radius;
    for (int i = 0; i <= resolution; ++i)
        for (int j = 0; j <= resolution; ++j) {
            const double r = R * i / resolution, xn = R * j / resolution;
            if (r < R0 && xn < R0) continue;  // inside C(rho/2)
            const auto d = profile.radial(r, xn, n);
            const double x2 = r * r + xn * xn;
            const double g = std::sqrt(d.d_r * d.d_r + d.d_n * d.d_n);
            out.gradient_constant = std::max(out.gradient_constant, std::sqrt(x2) * g);
            out.laplacian_constant = std::max(out.laplacian_constant, x2 * std::abs(d.laplacian));
            ++out.samples;
        }
    return out;
}

}  // namespace blowup
