#pragma once

/**
 * @file numerics.hpp
 * @brief Generic numerical services: adaptive quadrature, Monte Carlo,
 * finite differences, least-squares fitting, bracketed root finding, Gamma.
 *
 * Quadrature is a globally adaptive Gauss-Kronrod (10/21) scheme. Infinite
 * intervals are mapped onto [0, 1) with x = s * t / (1 - t), which turns a
 * polynomial tail x^{-p} (p >= 2) into a bounded integrand, so there is no
 * truncation radius to tune.
 */

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace blowup::numerics {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_subdivisions = 4000;
    int mc_samples = 64;
    std::uint64_t rng_seed = 20240917;

    /// Throws ValidationError if any invariant is violated.
    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
};

using ScalarFn = std::function<double(double)>;

/// Adaptive integral of f over [a, b]. Optional interior breakpoints split the
/// initial partition (useful for kinks or scale changes). Throws
/// NonConvergence if max(abs_tol, rel_tol * |value|) is not met.
QuadResult integrate(const ScalarFn& f, double a, double b, const QuadratureSpec& spec,
                     std::span<const double> breakpoints = {});

/// Integral of f over [0, inf) using the substitution x = scale * t / (1 - t).
/// `scale` should be the length scale where f turns over into its tail.
QuadResult integrate_halfline(const ScalarFn& f, const QuadratureSpec& spec, double scale = 1.0);

/// Iterated integral  int_a^b dx int_{lo(x)}^{hi(x)} f(x, y) dy.
/// The inner integral is computed to the same relative tolerance.
QuadResult integrate_2d(const std::function<double(double, double)>& f, double a, double b,
                        const std::function<double(double)>& lo,
                        const std::function<double(double)>& hi, const QuadratureSpec& spec,
                        std::span<const double> outer_breakpoints = {},
                        std::span<const double> inner_breakpoints = {});

/// Geometric breakpoints scale, 2*scale, 4*scale, ... strictly inside (a, b).
std::vector<double> geometric_breakpoints(double a, double b, double scale, double ratio = 2.0);

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

/// Portable deterministic generator (splitmix-seeded xoshiro256**). Unlike the
/// <random> distributions, its output is identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next();
    double uniform();           // [0, 1)
    double normal();            // Box-Muller
    std::vector<double> unit_sphere(int dim);  // uniform on S^{dim-1} in R^dim

private:
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct MonteCarloResult {
    double mean = 0.0;
    double standard_error = 0.0;
    int samples = 0;
};

/// Mean and standard error of precomputed samples.
MonteCarloResult sample_statistics(std::span<const double> samples);

/// Sample mean of `sample(rng)` over `count` draws, with standard error.
MonteCarloResult monte_carlo(const std::function<double(Rng&)>& sample, int count,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Finite differences (second-order central stencils)
// ---------------------------------------------------------------------------

using FieldFn = std::function<double(std::span<const double>)>;

std::vector<double> fd_gradient(const FieldFn& f, std::span<const double> x, double h);
double fd_laplacian(const FieldFn& f, std::span<const double> x, double h);

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

struct FitResult {
    std::vector<double> coefficients;
    double residual_norm = 0.0;
    double condition_estimate = 0.0;
};

/// Least-squares fit of ys against the given basis functions of xs.
FitResult fit_linear_model(std::span<const double> xs, std::span<const double> ys,
                           std::span<const std::function<double(double)>> basis);

/// Coefficients a_0 + a_1 x + ... + a_degree x^degree.
FitResult fit_polynomial(std::span<const double> xs, std::span<const double> ys, int degree);

/// log y = c_0 + slope * log x; coefficients are {c_0, slope}.
FitResult fit_loglog(std::span<const double> xs, std::span<const double> ys);

// ---------------------------------------------------------------------------
// Roots and special functions
// ---------------------------------------------------------------------------

/// Brent's method with bisection fallback. The result always lies in [lo, hi].
/// Throws NoSignChange unless f(lo) * f(hi) < 0 (or one endpoint is a root).
double find_root_bracketed(const ScalarFn& f, double lo, double hi, double tol);

/// Gamma(x) for x > 0; DomainError otherwise.
double gamma_fn(double x);

/// log Gamma(x) for x > 0; DomainError otherwise.
double log_gamma_fn(double x);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Results are
/// written by index, so output does not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// Worker cap: BLOWUPLAB_THREADS if set (>= 1), else hardware concurrency.
int default_thread_count();

}  // namespace blowup::numerics
