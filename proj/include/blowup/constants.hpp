#pragma once

/**
 * @file constants.hpp
 * @brief Closed-form constants: alpha_n, sphere measures, the radial integrals
 * B(m, k; D) and the half-space norms of the unit bubble U_1.
 *
 * B(m, k; D) = omega_{n-2} * int_0^inf r^{n-2+m} / (r^2 + D^2 - 1)^k dr
 *            = omega_{n-2} Gamma(s) Gamma(k - s) / (2 Gamma(k) (D^2 - 1)^{k - s}),
 * with s = (n + m - 1) / 2. beta^m_n(D) is B(m, n; D).
 */

#include <string>

#include "blowup/numerics.hpp"

namespace blowup {

struct ProblemParams {
    int n = 6;
    double D = 1.5;

    /// Throws DomainError unless n >= 3 and D > 1 (finite).
    void validate() const;
    double crit_exponent() const;   // 2* = 2n/(n-2)
    double trace_exponent() const;  // 2# = 2(n-1)/(n-2)
};

/// (4n(n-1))^{(n-2)/4}; DomainError for n < 3.
double alpha(int n);

/// Surface measure of the unit sphere S^k in R^{k+1}; DomainError for k < 0.
double omega(int k);

struct RadialIntegralIndex {
    int m = 0;  // moment offset, >= 0
    int k = 1;  // denominator exponent, >= 1
};

enum class RadialMethod { gamma, quadrature, both };

/// B(m, k; D). Divergent if n + m - 1 >= 2k; DomainError if D <= 1 or the
/// index is out of range. `both` computes the two paths, throws
/// NonConvergence if they disagree by more than spec.rel_tol, and returns the
/// Gamma value.
double radial_integral(const ProblemParams& params, RadialIntegralIndex idx,
                       RadialMethod method = RadialMethod::gamma,
                       const numerics::QuadratureSpec& spec = {});

/// omega_{n-2} int_0^inf r^{n-2+m} (r^2 + a)^{-k} dr for real m > -(n-1) and
/// real k, a > 0. Divergent unless k > (n + m - 1)/2.
double radial_moment(int n, double m, double k, double a);

enum class NormKind { grad_sq, l2_volume, crit_volume, crit_trace, l2n_np2_volume, trace_l2 };

/// reduced: inner r-integral in closed form, outer x_n-integral by quadrature.
/// direct_2d: both variables by quadrature (the independent oracle).
enum class NormMethod { reduced, direct_2d };

/// Half-space norms of U_1 = U_{1,0}:
///   grad_sq         int |grad U_1|^2
///   l2_volume       int U_1^2                     (n >= 5)
///   crit_volume     int U_1^{2*}
///   crit_trace      int_{boundary} U_1^{2#}
///   l2n_np2_volume  ||U_1||_{L^{2n/(n+2)}}        (n >= 7)
///   trace_l2        int_{boundary} U_1^2
double bubble_norm(const ProblemParams& params, NormKind kind,
                   const numerics::QuadratureSpec& spec = {},
                   NormMethod method = NormMethod::reduced);

/// Energy of U_1 on the half space (the delta^0 part of E(W)):
/// (2(n-1)/(n-2)) grad_sq + ((n-2)/(2n)) crit_volume
///   - ((n-2) D / sqrt(n(n-1))) crit_trace.      Requires n >= 5.
double bubble_energy_constant(const ProblemParams& params,
                              const numerics::QuadratureSpec& spec = {});

std::string to_string(NormKind kind);
NormKind norm_kind_from_string(const std::string& name);  // ValidationError if unknown
std::string to_string(RadialMethod method);
RadialMethod radial_method_from_string(const std::string& name);

}  // namespace blowup
