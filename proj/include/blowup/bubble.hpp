#pragma once

/**
 * @file bubble.hpp
 * @brief The half-space bubbles
 *
 *   U_{delta,xi}(x) = alpha_n delta^{(n-2)/2} / (|xbar - xi|^2 + (x_n + delta D)^2 - delta^2)^{(n-2)/2},
 *
 * which solve  -(4(n-1)/(n-2)) Lap u = -u^{(n+2)/(n-2)}  in the upper half space
 * with  (2/(n-2)) du/dnu = (D/sqrt(n(n-1))) u^{n/(n-2)}  on x_n = 0 (nu = -e_n),
 * and the kernel functions J_j of the linearization at U_{1,0}.
 *
 * Points are full n-vectors (xbar, x_n); boundary points are (n-1)-vectors.
 */

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "blowup/constants.hpp"

namespace blowup {

struct BubbleParams {
    double delta = 1.0;
    std::vector<double> xi;  // empty means the origin of R^{n-1}

    /// ValidationError unless delta > 0 and xi has n-1 (or 0) components.
    void validate(int n) const;
};

/// A residual together with the magnitude of the terms that produced it, so
/// that value / scale is a meaningful relative error.
struct Residual {
    double value = 0.0;
    double scale = 0.0;
    double relative() const { return scale > 0.0 ? std::abs(value) / scale : std::abs(value); }
};

/// Value, gradient and Laplacian of a field, plus the summed magnitude of
/// the Laplacian's constituent terms.
struct FieldDerivs {
    double value = 0.0;
    std::vector<double> grad;
    double laplacian = 0.0;
    double laplacian_scale = 0.0;
};

class Bubble {
public:
    /// alpha_scale multiplies alpha_n; anything but 1 breaks the boundary
    /// condition and is only meant for negative controls.
    Bubble(const ProblemParams& params, const BubbleParams& bp, double alpha_scale = 1.0);

    double eval(std::span<const double> x) const;
    std::vector<double> grad(std::span<const double> x) const;
    double laplacian(std::span<const double> x) const;
    FieldDerivs derivs(std::span<const double> x) const;

    /// -c Lap U + U^{(n+2)/(n-2)} with c = 4(n-1)/(n-2).
    Residual interior_residual(std::span<const double> x) const;
    /// Same, with Lap U from a central-difference stencil of step h.
    Residual interior_residual_fd(std::span<const double> x, double h) const;
    /// (2/(n-2)) dU/dnu - (D/sqrt(n(n-1))) U^{n/(n-2)} at (xbar, 0).
    Residual boundary_residual(std::span<const double> xbar) const;

    /// Evaluation without the x_n >= 0 check (finite-difference stencils
    /// straddle the boundary).
    double eval_unchecked(std::span<const double> x) const;

    const ProblemParams& params() const { return params_; }
    const BubbleParams& bubble_params() const { return bp_; }

private:
    ProblemParams params_;
    BubbleParams bp_;
    double amplitude_;  // alpha_n * alpha_scale * delta^{(n-2)/2}
};

double bubble_eval(const ProblemParams& params, const BubbleParams& bp, std::span<const double> x);
std::vector<double> bubble_grad(const ProblemParams& params, const BubbleParams& bp,
                                std::span<const double> x);
double bubble_laplacian(const ProblemParams& params, const BubbleParams& bp,
                        std::span<const double> x);
Residual boundary_residual(const ProblemParams& params, const BubbleParams& bp,
                           std::span<const double> xbar);

// ---------------------------------------------------------------------------
// Kernel of the linearized problem at U_{1,0}
// ---------------------------------------------------------------------------

/// j in 1..n-1: dU/dx_j = alpha (2-n) x_j / Q^{n/2}.
/// j = n: dU/d delta at delta = 1, = (alpha (n-2)/2)(|x|^2 + 1 - D^2) / Q^{n/2}.
double kernel_eval(const ProblemParams& params, int j, std::span<const double> x);
FieldDerivs kernel_derivs(const ProblemParams& params, int j, std::span<const double> x);

enum class Where { interior, boundary };

/// interior: -c Lap v + ((n+2)/(n-2)) U^{4/(n-2)} v at x (n-vector).
/// boundary: (2/(n-2)) dv/dnu - (D/(n-2)) sqrt(n/(n-1)) U^{2/(n-2)} v at
///           (xbar, 0), xbar an (n-1)-vector.
/// `use_bubble` replaces v by U_{1,0} itself (negative control).
Residual linearized_residual(const ProblemParams& params, int j, std::span<const double> point,
                             Where where, bool use_bubble = false);

// ---------------------------------------------------------------------------
// Randomized verifiers
// ---------------------------------------------------------------------------

/// Maximum relative residuals of U_{delta,xi} over `points` random samples
/// (random delta, xi and location for each sample). The fd checks use
/// delta = 1 and points within a few units of the core, where a fixed
/// stencil step resolves the Laplacian.
struct BubbleCheck {
    int points = 0;
    double max_interior = 0.0;     // analytic Laplacian
    double max_interior_fd = 0.0;  // fd Laplacian, step h
    double max_boundary = 0.0;
    double max_gradient_fd = 0.0;  // |grad_fd - grad| / |grad|
};
BubbleCheck verify_bubble(const ProblemParams& params, int points, std::uint64_t seed,
                          double h = 1e-4);

/// Maximum relative residuals of every J_j, j = 1..n, at `points` random
/// interior and boundary locations, plus the fd check of J_n against
/// (U_{1+h,0} - U_{1-h,0}) / 2h.
struct KernelCheck {
    int points = 0;
    double max_interior = 0.0;
    double max_boundary = 0.0;
    double max_dilation_fd = 0.0;
};
KernelCheck verify_kernel(const ProblemParams& params, int points, std::uint64_t seed,
                          double h = 1e-5);

}  // namespace blowup
