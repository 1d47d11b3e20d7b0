#pragma once

/**
 * @file model_domain.hpp
 * @brief Quadratic model of the domain near an elliptic boundary point.
 *
 * The boundary is the graph x_n = phi(xbar) = sum_i k_i x_i^2 over the disc
 * |xbar| < rho. Omega inside the cylinder C(rho) is phi(xbar) <= x_n < rho;
 * the sliver Sigma between tangent plane and graph is 0 < x_n < phi(xbar).
 */

#include <span>
#include <vector>

namespace blowup {

struct ModelDomain {
    std::vector<double> curvatures;  // k_1 .. k_{n-1}, each >= 0
    double rho = 1.0;

    /// ValidationError on an empty curvature list, negative or non-finite
    /// k_i, or rho <= 0.
    void validate() const;
    int dimension() const { return static_cast<int>(curvatures.size()) + 1; }
    bool equal_curvatures() const;
    bool flat() const;
    /// H(0) = 2 sum k_i / (n-1).
    double mean_curvature_origin() const;
};

/// Equal curvatures k in dimension n.
ModelDomain uniform_domain(int n, double k, double rho = 1.0);

/// phi(xbar) = sum k_i x_i^2; DomainError if |xbar| > rho.
double phi(const ModelDomain& domain, std::span<const double> xbar);
std::vector<double> grad_phi(const ModelDomain& domain, std::span<const double> xbar);

/// (1/(n-1)) div(grad phi / sqrt(1 + |grad phi|^2)); DomainError outside the disc.
double mean_curvature(const ModelDomain& domain, std::span<const double> xbar);

/// Mean curvature along a ray xbar = r theta, from the direction moments
/// kappa2 = sum k_i^2 theta_i^2 and kappa3 = sum k_i^3 theta_i^2.
double mean_curvature_ray(int n, double sum_k, double kappa2, double kappa3, double r);

/// sqrt(1 + |grad phi|^2), the graph's surface element.
double surface_jacobian(const ModelDomain& domain, std::span<const double> xbar);

enum class PatchRegion { omega, sigma, outside };

/// omega: |xbar| < rho and phi <= x_n < rho; sigma: |xbar| < rho and
/// 0 < x_n < phi; everything else is outside.
PatchRegion patch_membership(const ModelDomain& domain, std::span<const double> x);
bool sigma_membership(const ModelDomain& domain, std::span<const double> x);

/// chi(x) = s(|xbar|) s(|x_n|) with s the quintic smoothstep falling from 1
/// at inner_radius to 0 at outer_radius (C^2).
struct CutoffProfile {
    double inner_radius = 0.5;
    double outer_radius = 1.0;
    int smoothness = 5;  // polynomial order of the smoothstep

    static CutoffProfile for_radius(double rho) { return {0.5 * rho, rho, 5}; }

    /// 1D profile and its first two derivatives.
    double s(double t) const;
    double ds(double t) const;
    double d2s(double t) const;

    double value(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;
    double laplacian(std::span<const double> x) const;

    /// The same in (r, x_n) variables for dimension n.
    struct Radial {
        double value, d_r, d_n, laplacian;
    };
    Radial radial(double r, double xn, int n) const;
};

/// Sampled suprema over A(rho) = C(rho) \ C(rho/2) of |x| |grad chi| and
/// |x|^2 |Lap chi| on a resolution x resolution grid in (r, x_n).
struct CutoffBounds {
    double gradient_constant = 0.0;
    double laplacian_constant = 0.0;
    int samples = 0;
};
CutoffBounds cutoff_bounds(const CutoffProfile& profile, int n, int resolution);

}  // namespace blowup
