#include "blowup/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "blowup/bubble.hpp"
#include "blowup/constants.hpp"
#include "blowup/energy.hpp"
#include "blowup/errors.hpp"
#include "blowup/model_domain.hpp"
#include "blowup/numerics.hpp"
#include "blowup/reduction.hpp"

namespace blowup::cli {

namespace {

using json = nlohmann::ordered_json;

enum class Kind { integer, real, text, reals };

struct Key {
    std::string name;
    Kind kind;
    json def;  // null: optional without default, or required when `required`
    std::string help;
    bool required = false;
};

std::string flag_name(const std::string& key) {
    std::string f = key;
    for (auto& c : f)
        if (c == '_') c = '-';
    return "--" + f;
}

std::string key_name(const std::string& s) {
    std::string k = s;
    for (auto& c : k)
        if (c == '-') c = '_';
    return k;
}

double parse_real(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ValidationError(key + ": '" + s + "' is not a number");
    }
    if (used != s.size()) throw ValidationError(key + ": '" + s + "' is not a number");
    return v;
}

// Merged settings: defaults, then the config file, then explicit flags.
class Settings {
public:
    Settings(const std::vector<Key>& keys, const json& config, const std::map<std::string, std::string>& flags) {
        for (const auto& k : keys) kinds_[k.name] = k.kind;
        for (const auto& k : keys) values_[k.name] = k.def;
        for (auto it = config.begin(); it != config.end(); ++it) {
            const std::string name = key_name(it.key());
            if (!kinds_.count(name)) throw ValidationError("unknown config key '" + it.key() + "'");
            values_[name] = normalize(name, it.value());
        }
        for (const auto& [name, text] : flags) values_[name] = normalize(name, json(text));
        for (const auto& k : keys)
            if (k.required && values_[k.name].is_null())
                throw ValidationError("missing required setting " + flag_name(k.name));
    }

    bool has(const std::string& k) const { return !values_.at(k).is_null(); }
    int integer(const std::string& k) const { return values_.at(k).get<int>(); }
    double real(const std::string& k) const { return values_.at(k).get<double>(); }
    std::string text(const std::string& k) const { return values_.at(k).get<std::string>(); }
    std::vector<double> reals(const std::string& k) const { return values_.at(k).get<std::vector<double>>(); }

    json echo() const {
        json out = json::object();
        for (const auto& [k, v] : values_) out[k] = v;
        return out;
    }

private:
    json normalize(const std::string& name, const json& v) const {
        const Kind kind = kinds_.at(name);
        if (v.is_null()) return v;
        switch (kind) {
            case Kind::integer: {
                double d;
                if (v.is_string()) d = parse_real(name, v.get<std::string>());
                else if (v.is_number()) d = v.get<double>();
                else throw ValidationError(name + " must be an integer");
                if (d != std::floor(d) || std::abs(d) > 1e9) throw ValidationError(name + " must be an integer");
                return json(static_cast<int>(d));
            }
            case Kind::real: {
                double d;
                if (v.is_string()) d = parse_real(name, v.get<std::string>());
                else if (v.is_number()) d = v.get<double>();
                else throw ValidationError(name + " must be a number");
                if (!std::isfinite(d)) throw ValidationError(name + " must be finite");
                return json(d);
            }
            case Kind::text:
                if (!v.is_string()) throw ValidationError(name + " must be a string");
                return v;
            case Kind::reals: {
                std::vector<double> xs;
                if (v.is_array()) {
                    for (const auto& e : v) {
                        if (!e.is_number()) throw ValidationError(name + " must be a list of numbers");
                        xs.push_back(e.get<double>());
                    }
                } else if (v.is_string()) {
                    std::stringstream ss(v.get<std::string>());
                    std::string item;
                    while (std::getline(ss, item, ','))
                        if (!item.empty()) xs.push_back(parse_real(name, item));
                } else if (v.is_number()) {
                    xs.push_back(v.get<double>());
                } else {
                    throw ValidationError(name + " must be a list of numbers");
                }
                for (double x : xs)
                    if (!std::isfinite(x)) throw ValidationError(name + " entries must be finite");
                return json(xs);
            }
        }
        return v;
    }

    std::map<std::string, Kind> kinds_;
    std::map<std::string, json> values_;
};

// ---------------------------------------------------------------------------

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            if (const auto* d = std::get_if<double>(&row[i])) out += format_real(*d);
            else if (const auto* n = std::get_if<long long>(&row[i])) out += std::to_string(*n);
            else out += std::get<std::string>(row[i]);
        }
        out += "\n";
    }
    return out;
}

json table_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
        rows.push_back(r);
    }
    return {{"columns", t.columns}, {"rows", rows}};
}

struct Report {
    std::string command;
    json inputs = json::object();
    json results = json::object();
    json references = json::object();
    json errors = json::object();
    Table table;

    void reference(const std::string& name, double value, const std::string& provenance) {
        references[name] = {{"value", value}, {"provenance", provenance}};
    }
    void check(const std::string& name, double value, double tolerance) {
        errors[name] = {{"value", value}, {"tolerance", tolerance}, {"pass", value <= tolerance}};
    }
    bool pass() const {
        for (const auto& [k, e] : errors.items())
            if (!e["pass"].get<bool>()) return false;
        return true;
    }
    json to_json() const {
        json j = {{"command", command}, {"inputs", inputs}, {"results", results}, {"references", references},
                  {"errors", errors}, {"pass", pass()}};
        if (!table.rows.empty()) j["table"] = table_json(table);
        return j;
    }
};

double rel_err(double v, double ref) { return ref == 0.0 ? std::abs(v) : std::abs(v - ref) / std::abs(ref); }

// ---------------------------------------------------------------------------
// Shared setting groups

std::vector<Key> quadrature_keys() {
    const numerics::QuadratureSpec d;
    return {{"rel_tol", Kind::real, d.rel_tol, "quadrature relative tolerance"},
            {"abs_tol", Kind::real, d.abs_tol, "quadrature absolute tolerance"},
            {"max_subdivisions", Kind::integer, d.max_subdivisions, "adaptive panel splits"},
            {"mc_samples", Kind::integer, d.mc_samples, "Monte Carlo directions"},
            {"seed", Kind::integer, static_cast<int>(d.rng_seed), "random seed"}};
}

numerics::QuadratureSpec quadrature(const Settings& s) {
    numerics::QuadratureSpec q;
    q.rel_tol = s.real("rel_tol");
    q.abs_tol = s.real("abs_tol");
    q.max_subdivisions = s.integer("max_subdivisions");
    q.mc_samples = s.integer("mc_samples");
    if (s.integer("seed") < 0) throw ValidationError("seed must be >= 0");
    q.rng_seed = static_cast<std::uint64_t>(s.integer("seed"));
    q.validate();
    return q;
}

std::vector<Key> domain_keys(double default_k) {
    return {{"curvatures", Kind::reals, nullptr, "principal curvatures k_1..k_{n-1}"},
            {"k", Kind::real, default_k, "equal curvature used when curvatures is unset"},
            {"rho", Kind::real, 1.0, "patch radius"},
            {"method", Kind::text, "auto", "auto | radial | monte-carlo"}};
}

ModelDomain domain(const Settings& s, int n) {
    ModelDomain d = s.has("curvatures") ? ModelDomain{s.reals("curvatures"), s.real("rho")}
                                        : uniform_domain(n, s.real("k"), s.real("rho"));
    d.validate();
    if (d.dimension() != n)
        throw ValidationError("curvatures must list n-1 = " + std::to_string(n - 1) + " values");
    return d;
}

ProblemParams problem(const Settings& s) {
    ProblemParams p{s.integer("n"), s.real("D")};
    p.validate();
    return p;
}

std::vector<double> delta_grid(const Settings& s) {
    return s.has("deltas") ? s.reals("deltas") : default_delta_grid();
}

// ---------------------------------------------------------------------------
// Commands

void cmd_beta(const Settings& s, Report& r) {
    const auto p = problem(s);
    const RadialIntegralIndex idx{s.integer("m"), s.integer("k")};
    const auto method = radial_method_from_string(s.text("method"));
    const auto spec = quadrature(s);
    const double closed = radial_integral(p, idx, RadialMethod::gamma, spec);
    const char* prov = "omega_{n-2} Gamma(s) Gamma(k-s) / (2 Gamma(k) (D^2-1)^{k-s}), s = (n+m-1)/2";
    double value = closed;
    if (method != RadialMethod::gamma) {
        value = radial_integral(p, idx, method, spec);
        const double quad = radial_integral(p, idx, RadialMethod::quadrature, spec);
        r.results["quadrature"] = quad;
        r.reference("closed_form", closed, prov);
        r.check("closed_form_vs_quadrature", rel_err(quad, closed), spec.rel_tol);
    }
    r.results["value"] = value;
    r.table = {{"n", "m", "k", "D", "value"},
               {{static_cast<long long>(p.n), static_cast<long long>(idx.m), static_cast<long long>(idx.k), p.D, value}}};
}

void cmd_cn_scan(const Settings& s, Report& r) {
    const int n = s.integer("n");
    const auto scan = c_n_scan(n, s.real("D_min"), s.real("D_max"), s.integer("steps"));
    int zeros = 0;
    r.table.columns = {"D", "C_n", "sign"};
    for (const auto& pt : scan) {
        zeros += pt.sign == 0;
        r.table.rows.push_back({pt.D, pt.value, static_cast<long long>(pt.sign)});
    }
    const int changes = sign_changes(scan);
    r.results["sign_changes"] = changes;
    r.results["zero_to_rounding"] = zeros;
    r.reference("root", predicted_root(n), "sqrt((n+1)/(n-1))");
    r.check("sign_changes_minus_one", std::abs(changes - 1), 0.0);
}

void cmd_cn_root(const Settings& s, Report& r) {
    const int n = s.integer("n");
    const double root = c_n_root(n, s.real("tol"));
    r.results["root"] = root;
    r.reference("root", predicted_root(n), "sqrt((n+1)/(n-1))");
    r.check("root_abs_error", std::abs(root - predicted_root(n)), 1e-8);
    r.table = {{"n", "root"}, {{static_cast<long long>(n), root}}};
}

void cmd_cn_asym(const Settings& s, Report& r) {
    const int n = s.integer("n");
    const auto regime = regime_from_string(s.text("regime"));
    const auto a = c_n_asymptotics(n, regime);
    r.table.columns = {"D", regime == AsymptoticRegime::near_one ? "C_n" : "ratio"};
    for (std::size_t i = 0; i < a.D.size(); ++i) r.table.rows.push_back({a.D[i], a.values[i]});
    if (regime == AsymptoticRegime::near_one) {
        int bad = 0;
        for (double v : a.values) bad += !(v > 0.0);
        r.results["slope"] = a.slope;
        r.reference("slope", a.target_slope, "-n/2, from C_n ~ a_n (D-1)^{-n/2} with a_n > 0");
        r.check("slope_rel_error", rel_err(a.slope, a.target_slope), 0.02);
        r.check("nonpositive_values", bad, 0.0);
    } else {
        int bad = 0;
        for (double v : a.values) bad += !(v < 0.0);
        r.results["b_n_estimate"] = -a.estimate;
        r.results["last_decade_change"] = a.last_decade_change;
        r.check("last_decade_change", a.last_decade_change, 0.01);
        r.check("nonnegative_ratios", bad, 0.0);
    }
}

void cmd_verify_bubble(const Settings& s, Report& r) {
    const auto p = problem(s);
    if (s.integer("points") < 1) throw ValidationError("points must be >= 1");
    const auto c = verify_bubble(p, s.integer("points"), static_cast<std::uint64_t>(s.integer("seed")), s.real("fd_step"));
    r.results = {{"points", c.points}, {"max_interior", c.max_interior}, {"max_interior_fd", c.max_interior_fd},
                 {"max_boundary", c.max_boundary}, {"max_gradient_fd", c.max_gradient_fd}};
    r.check("max_interior", c.max_interior, 1e-12);
    r.check("max_interior_fd", c.max_interior_fd, 1e-6);
    r.check("max_boundary", c.max_boundary, 1e-12);
    r.check("max_gradient_fd", c.max_gradient_fd, 1e-6);
    r.table = {{"points", "max_interior", "max_interior_fd", "max_boundary", "max_gradient_fd"},
               {{static_cast<long long>(c.points), c.max_interior, c.max_interior_fd, c.max_boundary,
                 c.max_gradient_fd}}};
}

void cmd_verify_kernel(const Settings& s, Report& r) {
    const auto p = problem(s);
    if (s.integer("points") < 1) throw ValidationError("points must be >= 1");
    const auto c = verify_kernel(p, s.integer("points"), static_cast<std::uint64_t>(s.integer("seed")), s.real("fd_step"));
    r.results = {{"points", c.points}, {"max_interior", c.max_interior}, {"max_boundary", c.max_boundary},
                 {"max_dilation_fd", c.max_dilation_fd}};
    r.check("max_interior", c.max_interior, 1e-10);
    r.check("max_boundary", c.max_boundary, 1e-10);
    r.check("max_dilation_fd", c.max_dilation_fd, 1e-8);
    r.table = {{"points", "max_interior", "max_boundary", "max_dilation_fd"},
               {{static_cast<long long>(c.points), c.max_interior, c.max_boundary, c.max_dilation_fd}}};
}

void cmd_energy(const Settings& s, Report& r) {
    const auto p = problem(s);
    const auto d = domain(s, p.n);
    const auto spec = quadrature(s);
    const double mu = s.real("mu");
    if (!(mu > 0.0)) throw ValidationError("mu must be > 0");
    const auto e = energy_terms(p, d, {s.real("delta"), {}}, spec, energy_method_from_string(s.text("method")));
    const double total = e.total(mu);
    r.results = {{"e1", e.e1}, {"e2_coeff", e.e2_coeff}, {"e3", e.e3}, {"e4", e.e4}, {"e5", e.e5},
                 {"total", total}, {"directions", e.directions},
                 {"standard_errors", {{"e1", e.e1_se}, {"e2_coeff", e.e2_se}, {"e3", e.e3_se}, {"e4", e.e4_se}, {"e5", e.e5_se}}}};
    const double scale = std::abs(e.e1) + mu * std::abs(e.e2_coeff) + std::abs(e.e3) + std::abs(e.e4) + std::abs(e.e5);
    r.check("additivity", std::abs(total - (e.e1 + mu * e.e2_coeff + e.e3 + e.e4 + e.e5)), 1e-14 * scale);
    r.check("sign_violations", (e.e1 > 0 ? 0 : 1) + (e.e3 > 0 ? 0 : 1) + (e.e4 < 0 ? 0 : 1) + (e.e5 >= 0 ? 0 : 1), 0.0);
    r.table = {{"delta", "e1", "e2_coeff", "e3", "e4", "e5", "total"},
               {{e.delta, e.e1, e.e2_coeff, e.e3, e.e4, e.e5, total}}};
}

void cmd_expansion(const Settings& s, Report& r) {
    const auto p = problem(s);
    const auto d = domain(s, p.n);
    const auto spec = quadrature(s);
    const double mu = s.real("mu");
    if (!(mu > 0.0)) throw ValidationError("mu must be > 0");
    const auto x = expansion_fit(p, d, delta_grid(s), spec, energy_method_from_string(s.text("method")));
    json terms = json::object();
    for (const auto& t : x.terms)
        terms[t.name] = {{"intercept", t.intercept}, {"slope", t.slope}, {"residual_norm", t.fit.residual_norm}};
    r.results["terms"] = terms;
    r.results["H0"] = x.h0;
    r.results["energy_constant"] = x.energy_constant;

    const bool flat = d.flat();
    for (const auto& t : x.terms) {
        if (t.name == "aggregate" || t.name == "e2_ratio") continue;
        r.reference(t.name + "_slope", t.reference_slope, t.provenance);
        if (flat) r.check(t.name + "_slope_over_energy", std::abs(t.slope) / std::abs(x.energy_constant), 1e-3);
        else r.check(t.name + "_slope_rel_error", rel_err(t.slope, t.reference_slope), 0.01);
    }
    const auto& agg = x.term("aggregate");
    const double cn_ref = c_n(p) * x.h0;
    r.reference("aggregate_slope", cn_ref, "C_n(D) H(0)");
    r.reference("energy_constant", x.energy_constant,
                "(2(n-1)/(n-2)) int|grad U_1|^2 + ((n-2)/(2n)) int U_1^{2*} - ((n-2)D/sqrt(n(n-1))) int U_1^{2#}");
    if (flat) {
        r.check("aggregate_slope_over_energy", std::abs(agg.slope) / std::abs(x.energy_constant), 1e-3);
        r.check("intercept_rel_error", rel_err(agg.intercept, x.energy_constant), 5e-3);
    } else {
        // The predicted aggregate can vanish; measure it on the scale of the
        // four cancelling term slopes.
        r.results["aggregate_slope_scale"] = x.slope_scale;
        r.check("aggregate_slope_error", std::abs(agg.slope - cn_ref) / x.slope_scale, 0.01);
    }
    const auto& e2 = x.term("e2_ratio");
    r.reference("e2_coeff_over_delta_sq", e2.reference_intercept, "(1/2) int U_1^2");
    r.check("e2_rel_error", rel_err(e2.intercept, e2.reference_intercept), 0.01);

    r.table.columns = {"delta", "e1", "e2_coeff", "e3", "e4", "e5", "mu_free_total", "total"};
    for (const auto& e : x.table)
        r.table.rows.push_back({e.delta, e.e1, e.e2_coeff, e.e3, e.e4, e.e5, e.mu_free(), e.total(mu)});
}

void cmd_residual_norms(const Settings& s, Report& r) {
    const auto p = problem(s);
    const auto d = domain(s, p.n);
    const auto spec = quadrature(s);
    const auto x = residual_norm_slopes(p, d, delta_grid(s), spec, energy_method_from_string(s.text("method")));
    json slopes = json::object();
    for (const auto& sl : x.slopes) {
        slopes[sl.name] = {{"slope", sl.slope}, {"plain_slope", sl.plain_slope}, {"certified", sl.certified}};
        r.reference(sl.name + "_slope", sl.target,
                    sl.name == "hw" ? "delta^1" : sl.name == "w_norm" ? "delta^2 (|log delta|^{2/3} divided out at n = 6)"
                                                                      : "delta^{(n-2)/2}");
        if (sl.certified) r.check(sl.name + "_slope_rel_error", rel_err(sl.slope, sl.target), 0.02);
    }
    r.results["slopes"] = slopes;
    r.table.columns = {"delta", "w_norm", "interior", "boundary", "hw"};
    for (const auto& n : x.table) r.table.rows.push_back({n.delta, n.w_norm, n.interior, n.boundary, n.hw});
}

void cmd_critical_point(const Settings& s, Report& r) {
    const auto p = problem(s);
    auto model = default_model(p.n, s.real("H0"));
    if (s.has("hess")) model.hess = s.reals("hess");
    if (s.has("p")) model.p = s.reals("p");
    model.validate(p.n);
    ReducedEnergyParams rp;
    rp.mu = s.real("mu");
    rp.validate();
    const double tol = s.real("newton_tol");
    const auto c = solve_critical_point(p, model, rp, tol, s.real("d0"), s.real("xi_offset"));
    r.results = {{"d", c.d}, {"xi", c.xi}, {"iterations", c.iterations}, {"gradient_norm", c.gradient_norm},
                 {"hessian_positive", c.positive_eigenvalues}, {"hessian_negative", c.negative_eigenvalues}};
    r.reference("d", c.d_closed_form, "-C_n(D) H0 / int U_1^2");
    r.check("d_rel_error", rel_err(c.d, c.d_closed_form), 1e-10);
    r.check("gradient_norm", c.gradient_norm, tol);
    r.check("iterations", c.iterations, 5.0);
    r.check("nonpositive_d", c.d > 0.0 ? 0.0 : 1.0, 0.0);
    r.table.columns = {"d", "iterations", "gradient_norm"};
    r.table.rows.push_back({c.d, static_cast<long long>(c.iterations), c.gradient_norm});
}

struct Command {
    std::string name;
    std::string description;
    std::vector<Key> keys;
    std::function<void(const Settings&, Report&)> run;
};

std::vector<Key> concat(std::vector<Key> a, const std::vector<Key>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<Command> commands() {
    const Key n6{"n", Kind::integer, 6, "dimension"};
    const Key D15{"D", Kind::real, 1.5, "curvature ratio D > 1"};
    const Key mu{"mu", Kind::real, 1.0, "mass parameter"};
    const Key deltas{"deltas", Kind::reals, nullptr, "delta grid (default: 8 geometric points in [1e-3, 1e-2])"};
    std::vector<Command> cs;
    cs.push_back({"beta", "radial integral B(m, k; D)",
                  concat({n6, {"m", Kind::integer, nullptr, "moment offset", true},
                          {"k", Kind::integer, nullptr, "denominator exponent", true},
                          {"D", Kind::real, nullptr, "curvature ratio", true},
                          {"method", Kind::text, "gamma", "gamma | quadrature | both"}},
                         quadrature_keys()),
                  cmd_beta});
    cs.push_back({"cn-scan", "sign scan of C_n over D",
                  {n6, {"D_min", Kind::real, 1.05, "scan start"}, {"D_max", Kind::real, 3.0, "scan end"},
                   {"steps", Kind::integer, 100, "grid points"}},
                  cmd_cn_scan});
    cs.push_back({"cn-root", "root of C_n", {n6, {"tol", Kind::real, 1e-10, "root tolerance"}}, cmd_cn_root});
    cs.push_back({"cn-asym", "asymptotics of C_n",
                  {n6, {"regime", Kind::text, "near-one", "near-one | infinity"}}, cmd_cn_asym});
    cs.push_back({"verify-bubble", "exact-solution residuals of the bubble",
                  {n6, D15, {"points", Kind::integer, 1000, "sample points"}, {"seed", Kind::integer, 42, "seed"},
                   {"fd_step", Kind::real, 1e-4, "finite-difference step"}},
                  cmd_verify_bubble});
    cs.push_back({"verify-kernel", "linearized kernel residuals",
                  {n6, D15, {"points", Kind::integer, 1000, "sample points"}, {"seed", Kind::integer, 7, "seed"},
                   {"fd_step", Kind::real, 1e-5, "finite-difference step"}},
                  cmd_verify_kernel});
    cs.push_back({"energy", "energy terms at one delta",
                  concat(concat({n6, D15, mu, {"delta", Kind::real, 1e-3, "concentration scale"}}, domain_keys(1.0)),
                         quadrature_keys()),
                  cmd_energy});
    cs.push_back({"expansion", "first-order expansion of the energy in delta",
                  concat(concat({n6, D15, mu, deltas}, domain_keys(1.0)), quadrature_keys()), cmd_expansion});
    cs.push_back({"residual-norms", "residual norm scalings of the ansatz",
                  concat(concat({{"n", Kind::integer, 7, "dimension"}, D15, deltas}, domain_keys(1.0)),
                         quadrature_keys()),
                  cmd_residual_norms});
    cs.push_back({"critical-point", "critical point of the reduced energy",
                  {n6, D15, {"H0", Kind::real, 2.0, "mean curvature at the critical point"},
                   {"mu", Kind::real, 100.0, "mass parameter"},
                   {"newton_tol", Kind::real, 1e-10, "gradient tolerance"},
                   {"d0", Kind::real, 1.0, "Newton start for d"},
                   {"xi_offset", Kind::real, 1e-2, "Newton start offset from p"},
                   {"hess", Kind::reals, nullptr, "Hessian of H, row-major (default -I)"},
                   {"p", Kind::reals, nullptr, "critical point of H (default 0)"}},
                  cmd_critical_point});
    return cs;
}

std::string error_type(const std::exception& e) {
    if (dynamic_cast<const Divergent*>(&e)) return "Divergent";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
    if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
    if (dynamic_cast<const SingularFit*>(&e)) return "SingularFit";
    if (dynamic_cast<const NoSignChange*>(&e)) return "NoSignChange";
    if (dynamic_cast<const MultipleRoots*>(&e)) return "MultipleRoots";
    if (dynamic_cast<const RegimeError*>(&e)) return "RegimeError";
    return "Error";
}

json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
    return j;
}

void write_output(const std::string& path, const std::string& format, const Report& r) {
    std::string fmt = format;
    if (fmt.empty()) fmt = path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? "csv" : "json";
    if (fmt != "csv" && fmt != "json") throw ValidationError("format must be csv or json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write output file '" + path + "'");
    if (fmt == "csv") out << to_csv(r.table);
    else out << r.to_json().dump(2) << "\n";
    if (!out) throw ValidationError("failed writing output file '" + path + "'");
}

}  // namespace

CliResult run(const std::vector<std::string>& args) {
    CliResult res;
    CLI::App app{"Numerical checks for a doubly critical Neumann blow-up construction", "blowuplab"};
    app.require_subcommand(1);
    const auto cmds = commands();

    struct Bound {
        const Command* cmd;
        CLI::App* sub;
        std::map<std::string, std::string> raw;
        std::string config, out, format;
    };
    std::vector<Bound> bound(cmds.size());
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        auto& b = bound[i];
        b.cmd = &cmds[i];
        b.sub = app.add_subcommand(cmds[i].name, cmds[i].description);
        b.sub->add_option("--config", b.config, "JSON config file (flags override it)");
        b.sub->add_option("--out", b.out, "write CSV or JSON output to this file");
        b.sub->add_option("--format", b.format, "csv | json (default from --out extension)");
        for (const auto& k : cmds[i].keys) b.sub->add_option(flag_name(k.name), b.raw[k.name], k.help);
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        std::ostringstream out, err;
        const int code = app.exit(e, out, err);
        res.out = out.str();
        res.err = err.str();
        res.exit_code = code == 0 ? 0 : 1;
        return res;
    }

    const auto start = std::chrono::steady_clock::now();
    for (auto& b : bound) {
        if (!b.sub->parsed()) continue;
        Report report;
        report.command = b.cmd->name;
        json out_json;
        try {
            std::map<std::string, std::string> given;
            for (const auto& k : b.cmd->keys)
                if (b.sub->count(flag_name(k.name)) > 0) given[k.name] = b.raw[k.name];
            const json config = b.config.empty() ? json::object() : read_config(b.config);
            const Settings settings(b.cmd->keys, config, given);
            report.inputs = settings.echo();
            b.cmd->run(settings, report);
            if (!b.out.empty()) write_output(b.out, b.format, report);
            out_json = report.to_json();
            res.exit_code = report.pass() ? 0 : 2;
            if (!report.pass()) res.err = b.cmd->name + ": check failed\n";
        } catch (const Error& e) {
            out_json = report.to_json();
            out_json["pass"] = false;
            out_json["error"] = {{"type", error_type(e)}, {"message", e.what()}};
            res.exit_code = dynamic_cast<const InputError*>(&e) ? 1 : 2;
            res.err = error_type(e) + ": " + e.what() + "\n";
        } catch (const json::exception& e) {
            out_json = report.to_json();
            out_json["pass"] = false;
            out_json["error"] = {{"type", "ValidationError"}, {"message", e.what()}};
            res.exit_code = 1;
            res.err = std::string("ValidationError: ") + e.what() + "\n";
        }
        out_json["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        res.out = out_json.dump(2) + "\n";
    }
    return res;
}

}  // namespace blowup::cli
