#pragma once

/**
 * @file energy.hpp
 * @brief Term-by-term energy of the ansatz W = chi * U_{delta,0} on the
 * quadratic model domain, its first-order expansion in delta, and the
 * computable residual norms of W.
 *
 *   E(u) = (2(n-1)/(n-2)) int |grad u|^2 + (mu/2) int u^2
 *        + ((n-2)/(2n)) int |u|^{2*}
 *        - ((n-2) D / sqrt(n(n-1))) int_{bdry} |u|^{2#}
 *        + (n-1) int_{bdry} H u^2.
 *
 * Volume integrals over Omega are assembled as (cylinder) - (Sigma) in the
 * scaled variable y = x / delta. With equal curvatures everything depends on
 * (|ybar|, y_n) only. With general curvatures the cylinder part is still
 * radial; the Sigma and boundary parts are averaged over directions theta on
 * S^{n-2} by seeded Monte Carlo, and standard errors are reported.
 */

#include <string>
#include <vector>

#include "blowup/bubble.hpp"
#include "blowup/constants.hpp"
#include "blowup/model_domain.hpp"
#include "blowup/numerics.hpp"

namespace blowup {

enum class EnergyMethod {
    automatic,   // radial when all k_i are equal, Monte Carlo otherwise
    radial,      // ValidationError unless the curvatures are equal
    monte_carlo  // direction sampling even for equal curvatures
};

struct EnergyBreakdown {
    double delta = 0.0;
    double e1 = 0.0;        // (2(n-1)/(n-2)) int |grad W|^2
    double e2_coeff = 0.0;  // (1/2) int W^2, multiplied by mu in total()
    double e3 = 0.0;        // ((n-2)/(2n)) int W^{2*}
    double e4 = 0.0;        // -((n-2)D/sqrt(n(n-1))) int_{bdry} W^{2#}
    double e5 = 0.0;        // (n-1) int_{bdry} H W^2
    // Monte Carlo standard errors (zero on the radial path).
    double e1_se = 0.0, e2_se = 0.0, e3_se = 0.0, e4_se = 0.0, e5_se = 0.0;
    int directions = 1;

    double total(double mu) const { return e1 + mu * e2_coeff + e3 + e4 + e5; }
    double mu_free() const { return e1 + e3 + e4 + e5; }
};

/// Energy terms of W at bp.delta. bp.xi must be the origin.
/// DomainError if delta > rho/10.
EnergyBreakdown energy_terms(const ProblemParams& params, const ModelDomain& domain,
                             const BubbleParams& bp, const numerics::QuadratureSpec& spec = {},
                             EnergyMethod method = EnergyMethod::automatic);

/// A computed quantity with its predicted value.
struct Comparison {
    std::string name;
    double value = 0.0;
    double standard_error = 0.0;
    double reference = 0.0;
    std::string provenance;
    double rel_error() const;
};

/// First-order Sigma and boundary-graph quantities of the plain bubble U_delta
/// (no cutoff), each divided by the power of delta that makes it O(1):
///   sigma_crit    int_Sigma U^{2*} / delta
///   sigma_grad    int_Sigma |grad U|^2 / delta
///   sigma_l2      int_Sigma U^2 / delta^3           (reference needs n >= 6)
///   trace_shift   (int_{graph} U^{2#} - int_{R^{n-1}} U_1^{2#}) / delta
///   curv_trace    int_{graph} H U^2 / delta
std::vector<Comparison> sigma_corrections(const ProblemParams& params, const ModelDomain& domain,
                                          const BubbleParams& bp,
                                          const numerics::QuadratureSpec& spec = {},
                                          EnergyMethod method = EnergyMethod::automatic);

/// Fit of one delta-dependent quantity against c0 + c1 delta + c2 delta^2.
struct TermFit {
    std::string name;
    std::vector<double> values;
    numerics::FitResult fit;
    double intercept = 0.0;
    double slope = 0.0;
    double reference_intercept = 0.0;
    double reference_slope = 0.0;
    std::string provenance;
};

struct ExpansionResult {
    std::vector<double> deltas;
    std::vector<EnergyBreakdown> table;
    // e1, e3, e4, e5, then the mu-free aggregate, then e2_coeff / delta^2.
    std::vector<TermFit> terms;
    double energy_constant = 0.0;  // the delta^0 limit of the mu-free energy
    double h0 = 0.0;
    // Sum of |reference_slope| over the four mu-free terms; the natural scale
    // for the aggregate slope, whose predicted value may cancel.
    double slope_scale = 0.0;

    const TermFit& term(const std::string& name) const;
};

/// Energy terms on a delta grid (in parallel over delta) with quadratic fits.
/// Requires n >= 6, at least 5 deltas, all in [1e-3, 1e-2].
ExpansionResult expansion_fit(const ProblemParams& params, const ModelDomain& domain,
                              const std::vector<double>& deltas,
                              const numerics::QuadratureSpec& spec = {},
                              EnergyMethod method = EnergyMethod::automatic,
                              int threads = numerics::default_thread_count());

/// 8 geometric points from 1e-3 to 1e-2.
std::vector<double> default_delta_grid(int count = 8, double lo = 1e-3, double hi = 1e-2);

struct ResidualNorms {
    double delta = 0.0;
    double w_norm = 0.0;    // ||W||_{L^{2n/(n+2)}(Omega)}
    double interior = 0.0;  // ||-c Lap W + W^{(n+2)/(n-2)}||_{L^{2n/(n+2)}(Omega)}
    double boundary = 0.0;  // ||(2/(n-2)) dW/dnu - (D/sqrt(n(n-1))) W^{n/(n-2)}||_{L^{2(n-1)/n}}
    double hw = 0.0;        // ||H W||_{L^{2(n-1)/n}(bdry)}
    int directions = 1;
};

/// The four norms at bp.delta (xi = 0). Requires n >= 6 and delta <= rho/10.
ResidualNorms residual_norm_components(const ProblemParams& params, const ModelDomain& domain,
                                       const BubbleParams& bp,
                                       const numerics::QuadratureSpec& spec = {},
                                       EnergyMethod method = EnergyMethod::automatic);

struct SlopeFit {
    std::string name;
    std::vector<double> values;
    double slope = 0.0;        // from log N = c0 + s log delta + c1 delta
    double plain_slope = 0.0;  // from log N = c0 + s log delta
    double target = 0.0;
    bool certified = true;     // false where a log factor makes the slope advisory
    numerics::FitResult fit;
};

struct ResidualSlopes {
    std::vector<double> deltas;
    std::vector<ResidualNorms> table;
    std::vector<SlopeFit> slopes;  // w_norm, interior, boundary, hw
};

/// Norms on a delta grid and log-log slopes. For n = 6 the W norm is divided
/// by |log delta|^{2/3} before fitting and marked uncertified.
ResidualSlopes residual_norm_slopes(const ProblemParams& params, const ModelDomain& domain,
                                    const std::vector<double>& deltas,
                                    const numerics::QuadratureSpec& spec = {},
                                    EnergyMethod method = EnergyMethod::automatic,
                                    int threads = numerics::default_thread_count());

std::string to_string(EnergyMethod method);
EnergyMethod energy_method_from_string(const std::string& name);

}  // namespace blowup
