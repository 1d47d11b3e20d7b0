#include "blowup/numerics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include <Eigen/Dense>

#include "blowup/errors.hpp"

namespace blowup::numerics {

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be > 0");
    if (!(abs_tol >= 0.0)) throw ValidationError("abs_tol must be >= 0");
    if (max_subdivisions < 1) throw ValidationError("max_subdivisions must be >= 1");
    if (mc_samples < 1) throw ValidationError("mc_samples must be >= 1");
}

namespace {

// Gauss-Kronrod 10/21 abscissae and weights (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208465617427, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk21(const ScalarFn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = kWgk[10] * fc;
    double gauss = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double dx = h * kXgk[j];
        const double fsum = f(c - dx) + f(c + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    kronrod *= h;
    gauss *= h;
    double err = std::abs(kronrod - gauss);
    // Below this level the difference is rounding noise, not truncation.
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(kronrod);
    if (err < floor) err = floor;
    return {a, b, kronrod, err};
}

}  // namespace

QuadResult integrate(const ScalarFn& f, double a, double b, const QuadratureSpec& spec,
                     std::span<const double> breakpoints) {
    spec.validate();
    if (a == b) return {};
    if (b < a) {
        auto r = integrate(f, b, a, spec, breakpoints);
        r.value = -r.value;
        return r;
    }
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Panel> heap;
    long evals = 0;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        heap.push_back(gk21(f, cuts[i], cuts[i + 1]));
        total += heap.back().value;
        err += heap.back().error;
        evals += 21;
    }
    std::make_heap(heap.begin(), heap.end());
    const double eps = std::numeric_limits<double>::epsilon();
    int splits = 0;
    while (true) {
        if (!std::isfinite(total)) throw NonConvergence("quadrature produced a non-finite value");
        if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
            // Confirm with exact sums so running-sum drift never decides.
            total = err = 0.0;
            for (const auto& p : heap) {
                total += p.value;
                err += p.error;
            }
            if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)))
                return {total, err, evals};
        }
        std::pop_heap(heap.begin(), heap.end());
        const Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (splits >= spec.max_subdivisions || !(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 8.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
            throw NonConvergence("adaptive quadrature on [" + std::to_string(a) + ", " +
                                 std::to_string(b) + "] did not reach tolerance: error " +
                                 std::to_string(err) + " vs target " +
                                 std::to_string(std::max(spec.abs_tol, spec.rel_tol * std::abs(total))));
        }
        const Panel left = gk21(f, worst.a, mid);
        const Panel right = gk21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        evals += 42;
        ++splits;
    }
}

QuadResult integrate_halfline(const ScalarFn& f, const QuadratureSpec& spec, double scale) {
    if (!(scale > 0.0)) throw ValidationError("integrate_halfline: scale must be > 0");
    auto g = [&](double t) {
        const double one_minus = 1.0 - t;
        const double x = scale * t / one_minus;
        if (!std::isfinite(x)) return 0.0;
        return f(x) * scale / (one_minus * one_minus);
    };
    // Breakpoints at x = scale * 2^j cluster panels where the tail starts.
    std::vector<double> bps;
    for (int j = -6; j <= 12; ++j) {
        const double x = std::ldexp(1.0, j);
        bps.push_back(x / (1.0 + x));
    }
    return integrate(g, 0.0, 1.0, spec, bps);
}

QuadResult integrate_2d(const std::function<double(double, double)>& f, double a, double b,
                        const std::function<double(double)>& lo,
                        const std::function<double(double)>& hi, const QuadratureSpec& spec,
                        std::span<const double> outer_breakpoints,
                        std::span<const double> inner_breakpoints) {
    long inner_evals = 0;
    std::vector<double> inner_bps(inner_breakpoints.begin(), inner_breakpoints.end());
    auto outer = [&](double x) {
        const double y0 = lo(x), y1 = hi(x);
        if (!(y1 > y0)) return 0.0;
        auto fy = [&](double y) { return f(x, y); };
        const QuadResult r = integrate(fy, y0, y1, spec, inner_bps);
        inner_evals += r.evaluations;
        return r.value;
    };
    QuadResult r = integrate(outer, a, b, spec, outer_breakpoints);
    // The reported error is the outer estimate; every inner integral already
    // meets the same relative tolerance.
    r.evaluations += inner_evals;
    return r;
}

std::vector<double> geometric_breakpoints(double a, double b, double scale, double ratio) {
    std::vector<double> out;
    if (!(scale > 0.0) || !(ratio > 1.0)) return out;
    for (double x = scale; x < b; x *= ratio)
        if (x > a) out.push_back(x);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

std::vector<double> Rng::unit_sphere(int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm2 = 0.0;
    while (norm2 == 0.0) {
        norm2 = 0.0;
        for (auto& c : v) {
            c = normal();
            norm2 += c * c;
        }
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : v) c *= inv;
    return v;
}

MonteCarloResult sample_statistics(std::span<const double> samples) {
    if (samples.empty()) throw ValidationError("sample_statistics: no samples");
    // Welford accumulation.
    double mean = 0.0, m2 = 0.0;
    std::size_t i = 0;
    for (double x : samples) {
        const double d = x - mean;
        mean += d / static_cast<double>(++i);
        m2 += d * (x - mean);
    }
    const auto count = static_cast<double>(samples.size());
    const double var = samples.size() > 1 ? m2 / (count - 1.0) : 0.0;
    return {mean, std::sqrt(var / count), static_cast<int>(samples.size())};
}

MonteCarloResult monte_carlo(const std::function<double(Rng&)>& sample, int count,
                             std::uint64_t seed) {
    if (count < 1) throw ValidationError("monte_carlo: count must be >= 1");
    Rng rng(seed);
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (auto& x : xs) x = sample(rng);
    return sample_statistics(xs);
}

// ---------------------------------------------------------------------------

std::vector<double> fd_gradient(const FieldFn& f, std::span<const double> x, double h) {
    std::vector<double> p(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        p[i] = x[i] + h;
        const double fp = f(p);
        p[i] = x[i] - h;
        const double fm = f(p);
        p[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

double fd_laplacian(const FieldFn& f, std::span<const double> x, double h) {
    std::vector<double> p(x.begin(), x.end());
    const double f0 = f(p);
    double lap = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        p[i] = x[i] + h;
        const double fp = f(p);
        p[i] = x[i] - h;
        const double fm = f(p);
        p[i] = x[i];
        lap += (fp - 2.0 * f0 + fm);
    }
    return lap / (h * h);
}

// ---------------------------------------------------------------------------

FitResult fit_linear_model(std::span<const double> xs, std::span<const double> ys,
                           std::span<const std::function<double(double)>> basis) {
    const auto m = static_cast<Eigen::Index>(xs.size());
    const auto p = static_cast<Eigen::Index>(basis.size());
    if (xs.size() != ys.size()) throw ValidationError("fit: xs and ys differ in length");
    if (p == 0 || m < p) throw SingularFit("fit: fewer samples than coefficients");

    Eigen::MatrixXd A(m, p);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        y(i) = ys[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < p; ++j)
            A(i, j) = basis[static_cast<std::size_t>(j)](xs[static_cast<std::size_t>(i)]);
    }
    if (!A.allFinite() || !y.allFinite()) throw SingularFit("fit: non-finite design or data");
    Eigen::VectorXd colscale = A.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (colscale(j) == 0.0) throw SingularFit("fit: zero basis column");
        A.col(j) /= colscale(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(p - 1);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12)) throw SingularFit("fit: design matrix is numerically rank-deficient");

    const Eigen::VectorXd c_scaled = svd.solve(y);
    FitResult out;
    out.coefficients.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j)
        out.coefficients[static_cast<std::size_t>(j)] = c_scaled(j) / colscale(j);
    out.residual_norm = (A * c_scaled - y).norm();
    out.condition_estimate = cond;
    return out;
}

FitResult fit_polynomial(std::span<const double> xs, std::span<const double> ys, int degree) {
    if (degree < 0) throw ValidationError("fit_polynomial: degree must be >= 0");
    if (xs.size() < static_cast<std::size_t>(degree) + 1)
        throw SingularFit("fit_polynomial: need at least degree + 1 samples");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() <= degree)
        throw SingularFit("fit_polynomial: not enough distinct nodes");
    std::vector<std::function<double(double)>> basis;
    for (int k = 0; k <= degree; ++k)
        basis.emplace_back([k](double x) { return std::pow(x, k); });
    return fit_linear_model(xs, ys, basis);
}

FitResult fit_loglog(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw SingularFit("fit_loglog: samples must be positive");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    return fit_polynomial(lx, ly, 1);
}

// ---------------------------------------------------------------------------

double find_root_bracketed(const ScalarFn& f, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw ValidationError("find_root_bracketed: tol must be > 0");
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!(fa * fb < 0.0) || !std::isfinite(fa) || !std::isfinite(fb))
        throw NoSignChange("find_root_bracketed: f(lo) and f(hi) do not differ in sign");

    const double eps = std::numeric_limits<double>::epsilon();
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < 500; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) break;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // Inverse quadratic interpolation, or secant when only two points.
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return std::clamp(b, std::min(lo, hi), std::max(lo, hi));
}

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be > 0");
    return std::tgamma(x);
}

double log_gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma_fn: argument must be > 0");
    return std::lgamma(x);
}

// ---------------------------------------------------------------------------

int default_thread_count() {
    if (const char* env = std::getenv("BLOWUPLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 256));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    threads = std::clamp(threads, 1, count);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    auto run = [&](int i) {
        try {
            fn(i);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    };
    if (threads == 1) {
        for (int i = 0; i < count; ++i) run(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (int i = next++; i < count; i = next++) run(i);
            });
        for (auto& th : pool) th.join();
    }
    // Lowest failing index wins, independent of scheduling.
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace blowup::numerics
