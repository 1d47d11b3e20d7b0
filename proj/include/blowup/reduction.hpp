#pragma once

/**
 * @file reduction.hpp
 * @brief The first-order constant C_n(D), its root, sign and asymptotics, and
 * the leading-order reduced energy
 *
 *   E(d, xi) = E_0 + (1/mu) (C_n(D) H(xi) d + (d^2/2) int U_1^2)
 *
 * with its critical point.
 */

#include <array>
#include <string>
#include <vector>

#include "blowup/constants.hpp"
#include "blowup/numerics.hpp"

namespace blowup {

/// The four summands of C_n(D):
///   -(n-1)(n-2) alpha^2 (D^2 B(2,n) + B(4,n))
///   -alpha^{2*} ((n-2)/(4n)) B(2,n)
///   +(n-2) sqrt((n-1)/n) alpha^{2#} D^2 B(2,n)
///   +(n-1) alpha^2 B(0,n-2)
struct CnTerms {
    std::array<double, 4> terms{};
    double value = 0.0;
    double scale = 0.0;       // sum of |terms|
    bool degenerate = false;  // |value| <= kZeroTolerance * scale
    /// -1, 0 or +1; 0 when degenerate.
    int sign() const { return degenerate ? 0 : (value > 0.0 ? 1 : -1); }
};

/// A value of C_n below this fraction of its summand scale is zero.
inline constexpr double kZeroTolerance = 1e-9;

/// DomainError for n < 5 or D <= 1.
CnTerms c_n_terms(const ProblemParams& params);
double c_n(const ProblemParams& params);

struct ScanPoint {
    double D = 0.0;
    double value = 0.0;
    int sign = 0;
};

/// c_n at `steps` equally spaced D in [d_min, d_max] (steps >= 2).
std::vector<ScanPoint> c_n_scan(int n, double d_min, double d_max, int steps);
/// The same on a geometric grid in D - 1.
std::vector<ScanPoint> c_n_scan_log(int n, double d_min, double d_max, int steps);

/// Number of strict sign changes between consecutive nonzero signs.
int sign_changes(const std::vector<ScanPoint>& scan);

/// sqrt((n+1)/(n-1)).
double predicted_root(int n);

/// Brent root of C_n on (1 + 1e-3, 10), then a scan of (root, 1e3] for a
/// second sign change. NoSignChange if no bracket exists (including C_n
/// vanishing to rounding on the whole bracket); MultipleRoots if the scan
/// finds another change. Requires n >= 6.
double c_n_root(int n, double tol);

enum class AsymptoticRegime { near_one, infinity };

struct AsymptoticResult {
    AsymptoticRegime regime = AsymptoticRegime::near_one;
    std::vector<double> D;
    std::vector<double> values;  // near_one: C_n; infinity: C_n (D^2-1)^{n/2} / D^3
    numerics::FitResult fit;     // near_one: log C_n against log(D-1)
    double slope = 0.0;          // near_one only
    double target_slope = 0.0;   // -n/2
    double estimate = 0.0;       // infinity: the limit of the ratio (-b_n)
    double last_decade_change = 0.0;
};

/// near_one: D - 1 in {1e-4, 1e-5, 1e-6}; infinity: D in {1e2, 1e3, 1e4}.
/// NonConvergence if the values are zero to rounding (no logarithm or sign
/// exists) or, at infinity, if the ratio changes by more than 1% over the
/// last decade. Requires n >= 6.
AsymptoticResult c_n_asymptotics(int n, AsymptoticRegime regime);

struct CriticalPointModel {
    double H0 = 2.0;
    std::vector<double> hess;  // row-major (n-1) x (n-1), symmetric
    std::vector<double> p;     // critical point of H, default origin

    /// ValidationError unless hess is square, symmetric, matches p and is
    /// nondegenerate.
    void validate(int n) const;
    double H(const std::vector<double>& xi) const;
    std::vector<double> grad_H(const std::vector<double>& xi) const;
};

/// H0 with hess = -I at the origin.
CriticalPointModel default_model(int n, double H0);

struct ReducedEnergyParams {
    double mu = 100.0;
    double d_min = 1e-6;
    double d_max = 1e6;
    void validate() const;
};

/// Constants entering the leading-order reduced energy.
struct ReducedConstants {
    double energy0 = 0.0;  // the delta^0 energy of U_1
    double cn = 0.0;
    double l2 = 0.0;       // int U_1^2
};
ReducedConstants reduced_constants(const ProblemParams& params);

double reduced_energy(const ReducedConstants& k, const CriticalPointModel& model,
                      const ReducedEnergyParams& rp, double d, const std::vector<double>& xi);
/// Components (d/dd, d/dxi_1, ..., d/dxi_{n-1}).
std::vector<double> reduced_gradient(const ReducedConstants& k, const CriticalPointModel& model,
                                     const ReducedEnergyParams& rp, double d,
                                     const std::vector<double>& xi);

double reduced_energy(const ProblemParams& params, const CriticalPointModel& model,
                      const ReducedEnergyParams& rp, double d, const std::vector<double>& xi);
std::vector<double> reduced_gradient(const ProblemParams& params, const CriticalPointModel& model,
                                     const ReducedEnergyParams& rp, double d,
                                     const std::vector<double>& xi);

struct CriticalPointResult {
    double d = 0.0;
    std::vector<double> xi;
    double d_closed_form = 0.0;
    int iterations = 0;
    double gradient_norm = 0.0;
    std::vector<double> hessian;  // row-major n x n Hessian of the reduced energy
    int positive_eigenvalues = 0;
    int negative_eigenvalues = 0;
};

/// d* = -C_n H0 / int U_1^2; degenerate when C_n is zero to rounding.
struct ClosedFormCritical {
    double d = 0.0;
    bool degenerate = false;
};
ClosedFormCritical closed_form_critical(const ProblemParams& params, const CriticalPointModel& model);

/// Newton iteration on the reduced gradient from (d0, p + offset).
/// RegimeError if C_n >= 0 (zero to rounding counts) or H0 <= 0;
/// NonConvergence after 50 iterations or on leaving d > 0.
CriticalPointResult solve_critical_point(const ProblemParams& params, const CriticalPointModel& model,
                                         const ReducedEnergyParams& rp, double newton_tol,
                                         double d0 = 1.0, double xi_offset = 1e-2);
/// Same with the constants supplied directly.
CriticalPointResult solve_critical_point(const ReducedConstants& k, const CriticalPointModel& model,
                                         const ReducedEnergyParams& rp, double newton_tol,
                                         double d0 = 1.0, double xi_offset = 1e-2);

std::string to_string(AsymptoticRegime regime);
AsymptoticRegime regime_from_string(const std::string& name);  // near-one | near_one | infinity

}  // namespace blowup
