#include "gpc/cli_io.hpp"

#include "gpc/digest.hpp"
#include "gpc/error.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <unistd.h>

#ifndef GPC_VERSION
#define GPC_VERSION "0.0.0"
#endif

namespace gpc {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view tool_version() { return GPC_VERSION; }

std::string_view task_name(Task task) {
    switch (task) {
        case Task::Surface: return "surface";
        case Task::Log: return "log";
        case Task::Measure: return "measure";
        case Task::Verify: return "verify";
        case Task::Counterexample: return "counterexample";
    }
    return "surface";
}

namespace {

// ---------------------------------------------------------------------------
// Source positions. nlohmann reports byte offsets for syntax errors only, so
// a second pass over the (already valid) text records the line on which each
// value starts, keyed by its field path.

class LineMap {
public:
    explicit LineMap(std::string_view text) : text_(text) {
        skip();
        value("");
    }

    std::optional<int> line(const std::string& path) const {
        auto it = lines_.find(path);
        if (it == lines_.end()) return std::nullopt;
        return it->second;
    }

private:
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    std::string string() {
        std::string out;
        ++pos_;  // opening quote
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') ++pos_;
            if (pos_ < text_.size()) out += text_[pos_++];
        }
        ++pos_;
        return out;
    }

    void value(const std::string& path) {
        lines_.emplace(path, line_);
        if (pos_ >= text_.size()) return;
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            for (skip(); pos_ < text_.size() && text_[pos_] != '}'; skip()) {
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                const std::string key = string();
                skip();
                ++pos_;  // colon
                skip();
                value(path.empty() ? key : path + "." + key);
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            int index = 0;
            for (skip(); pos_ < text_.size() && text_[pos_] != ']'; skip()) {
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                value(path + "[" + std::to_string(index++) + "]");
            }
            ++pos_;
        } else if (c == '"') {
            string();
        } else {
            while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
                   text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '}') {
                ++pos_;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

// ---------------------------------------------------------------------------
// Typed field access with addressed errors.

class Reader {
public:
    explicit Reader(const LineMap* lines) : lines_(lines) {}

    [[noreturn]] void parse_error(const std::string& path, const std::string& msg) const {
        fail(ErrorCode::ParseError, where(path) + msg);
    }
    [[noreturn]] void invalid(const std::string& path, const std::string& msg) const {
        fail(ErrorCode::ValidationError, where(path) + msg);
    }

    void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
        if (!obj.is_object()) parse_error(path, "expected an object");
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [key, _] : obj.items()) {
            if (!allowed.count(key)) invalid(join(path, key), "unknown field");
        }
    }

    const json* find(const json& obj, const char* key) const {
        auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    }

    double number(const json& j, const std::string& path) const {
        if (!j.is_number()) parse_error(path, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) invalid(path, "must be finite");
        return v;
    }

    std::int64_t integer(const json& j, const std::string& path) const {
        if (j.is_number_integer()) return j.get<std::int64_t>();
        if (j.is_number_float()) {
            const double v = j.get<double>();
            if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
        }
        parse_error(path, "expected an integer");
    }

    std::uint64_t unsigned_integer(const json& j, const std::string& path) const {
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        const std::int64_t v = integer(j, path);
        if (v < 0) invalid(path, "must be nonnegative");
        return static_cast<std::uint64_t>(v);
    }

    bool boolean(const json& j, const std::string& path) const {
        if (!j.is_boolean()) parse_error(path, "expected true or false");
        return j.get<bool>();
    }

    std::string text(const json& j, const std::string& path) const {
        if (!j.is_string()) parse_error(path, "expected a string");
        return j.get<std::string>();
    }

    std::vector<double> numbers(const json& j, const std::string& path) const {
        if (!j.is_array()) parse_error(path, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
        return out;
    }

    Vec vector(const json& j, const std::string& path, int dim) const {
        const std::vector<double> v = numbers(j, path);
        if (static_cast<int>(v.size()) != dim) {
            invalid(path, "expected " + std::to_string(dim) + " components, got " + std::to_string(v.size()));
        }
        return vec_from(v);
    }

    Mat matrix(const json& j, const std::string& path, int dim) const {
        if (!j.is_array()) parse_error(path, "expected an array of vectors");
        Mat m(static_cast<Eigen::Index>(j.size()), dim);
        for (std::size_t k = 0; k < j.size(); ++k) {
            m.row(static_cast<Eigen::Index>(k)) = vector(j[k], path + "[" + std::to_string(k) + "]", dim).transpose();
        }
        return m;
    }

    // Unit rows, with the normalized vector as a hint.
    void unit_rows(const Mat& m, const std::string& path) const {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const double norm = m.row(r).norm();
            if (std::abs(norm - 1.0) <= kUnitTol) continue;
            const std::string here = path + "[" + std::to_string(r) + "]";
            if (norm == 0.0) invalid(here, "zero vector");
            std::ostringstream os;
            os.precision(17);
            os << "not a unit vector (norm " << norm << "); normalized it reads [";
            for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? ", " : "") << m(r, c) / norm;
            os << "]";
            invalid(here, os.str());
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

private:
    std::string where(const std::string& path) const {
        std::string out;
        if (lines_) {
            // Fall back to the closest enclosing field that has a position.
            std::string p = path;
            for (;;) {
                if (auto l = lines_->line(p)) {
                    out = "line " + std::to_string(*l) + ", ";
                    break;
                }
                const auto cut = p.find_last_of(".[");
                if (cut == std::string::npos || p.empty()) break;
                p = p.substr(0, cut);
            }
        }
        return out + "field " + (path.empty() ? std::string("<root>") : path) + ": ";
    }

    const LineMap* lines_;
};

std::optional<Task> task_from(const std::string& s) {
    if (s == "surface") return Task::Surface;
    if (s == "log") return Task::Log;
    if (s == "measure") return Task::Measure;
    if (s == "verify") return Task::Verify;
    if (s == "counterexample") return Task::Counterexample;
    return std::nullopt;
}

// Runs a domain constructor and readdresses its failure to `path`.
template <class F>
auto domain(const Reader& rd, const std::string& path, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        rd.invalid(path, std::string(e.what()) + " (" + std::string(error_code_name(e.code())) + ")");
    }
}

ProblemFile parse_json(const json& root, const LineMap* lines) {
    const Reader rd(lines);
    rd.only_keys(root, "", {"schema", "problem", "dimension", "cone", "omega", "mu", "solver", "mc", "seed", "shape",
                            "verify", "counterexample", "scan"});
    ProblemFile p;

    const json* schema = rd.find(root, "schema");
    if (!schema) rd.invalid("schema", "missing (expected 1)");
    if (rd.integer(*schema, "schema") != kSchemaVersion) rd.invalid("schema", "unsupported schema version");

    const json* problem = rd.find(root, "problem");
    if (!problem) rd.invalid("problem", "missing");
    const auto task = task_from(rd.text(*problem, "problem"));
    if (!task) rd.invalid("problem", "expected one of surface, log, measure, verify, counterexample");
    p.task = *task;

    const json* dim = rd.find(root, "dimension");
    if (!dim) rd.invalid("dimension", "missing");
    p.dimension = static_cast<int>(rd.integer(*dim, "dimension"));
    if (p.dimension < 2 || p.dimension > kMaxDim) {
        rd.invalid("dimension", "must lie between 2 and " + std::to_string(kMaxDim));
    }
    const int n = p.dimension;

    const json* cone = rd.find(root, "cone");
    if (!cone) rd.invalid("cone", "missing");
    rd.only_keys(*cone, "cone", {"generators", "normals", "ref_dir"});
    for (const char* key : {"generators", "normals"}) {
        const json* m = rd.find(*cone, key);
        if (!m) rd.invalid(Reader::join("cone", key), "missing");
        Mat& target = std::string(key) == "generators" ? p.generators : p.normals;
        target = rd.matrix(*m, Reader::join("cone", key), n);
        rd.unit_rows(target, Reader::join("cone", key));
    }
    if (const json* r = rd.find(*cone, "ref_dir")) {
        p.ref_dir = rd.vector(*r, "cone.ref_dir", n);
        rd.unit_rows(Mat(p.ref_dir->transpose()), "cone.ref_dir");
    }
    const ConvexCone built = domain(rd, "cone", [&] { return p.cone(); });

    if (const json* o = rd.find(root, "omega")) {
        p.omega = rd.matrix(*o, "omega", n);
        rd.unit_rows(p.omega, "omega");
        if (p.omega.rows() == 0) rd.invalid("omega", "needs at least one direction");
        domain(rd, "omega", [&] { return DirectionSet::create(built, p.omega); });
    }
    if (const json* m = rd.find(root, "mu")) {
        p.mu = rd.numbers(*m, "mu");
        if (static_cast<Eigen::Index>(p.mu.size()) != p.omega.rows()) {
            rd.invalid("mu", "has " + std::to_string(p.mu.size()) + " weights for " + std::to_string(p.omega.rows()) +
                                 " directions");
        }
        for (std::size_t k = 0; k < p.mu.size(); ++k) {
            if (p.mu[k] < 0.0) rd.invalid("mu[" + std::to_string(k) + "]", "weights must be nonnegative");
        }
    }

    if (const json* s = rd.find(root, "seed")) p.seed = rd.unsigned_integer(*s, "seed");

    if (const json* mc = rd.find(root, "mc")) {
        rd.only_keys(*mc, "mc", {"samples", "batch_size", "antithetic"});
        if (const json* v = rd.find(*mc, "samples")) p.mc.n_samples = rd.integer(*v, "mc.samples");
        if (const json* v = rd.find(*mc, "batch_size")) p.mc.batch_size = rd.integer(*v, "mc.batch_size");
        if (const json* v = rd.find(*mc, "antithetic")) p.mc.antithetic = rd.boolean(*v, "mc.antithetic");
    }
    domain(rd, "mc", [&] {
        p.mc.validate();
        return 0;
    });

    if (const json* s = rd.find(root, "solver")) {
        rd.only_keys(*s, "solver", {"method", "max_iters", "step_init", "armijo_c", "damping", "mc_schedule",
                                    "tol_residual", "normalized", "initial_h"});
        if (const json* v = rd.find(*s, "method")) {
            const std::string m = rd.text(*v, "solver.method");
            if (m == "gradient") p.solver.method = SolveMethod::Gradient;
            else if (m == "fixed_point") p.solver.method = SolveMethod::FixedPoint;
            else rd.invalid("solver.method", "expected gradient or fixed_point");
        }
        if (const json* v = rd.find(*s, "max_iters")) p.solver.max_iters = static_cast<int>(rd.integer(*v, "solver.max_iters"));
        if (const json* v = rd.find(*s, "step_init")) p.solver.step_init = rd.number(*v, "solver.step_init");
        if (const json* v = rd.find(*s, "armijo_c")) p.solver.armijo_c = rd.number(*v, "solver.armijo_c");
        if (const json* v = rd.find(*s, "damping")) p.solver.damping = rd.number(*v, "solver.damping");
        if (const json* v = rd.find(*s, "tol_residual")) p.solver.tol_residual = rd.number(*v, "solver.tol_residual");
        if (const json* v = rd.find(*s, "normalized")) p.solver.normalized = rd.boolean(*v, "solver.normalized");
        if (const json* v = rd.find(*s, "mc_schedule")) {
            if (!v->is_array()) rd.parse_error("solver.mc_schedule", "expected an array of integers");
            p.solver.mc_schedule.clear();
            for (std::size_t k = 0; k < v->size(); ++k) {
                p.solver.mc_schedule.push_back(rd.integer((*v)[k], "solver.mc_schedule[" + std::to_string(k) + "]"));
            }
        }
        if (const json* v = rd.find(*s, "initial_h")) {
            p.solver.initial_h = rd.numbers(*v, "solver.initial_h");
            if (static_cast<Eigen::Index>(p.solver.initial_h->size()) != p.omega.rows()) {
                rd.invalid("solver.initial_h", "length differs from the number of directions");
            }
        }
    }
    p.solver.seed = p.seed;
    p.solver.mc = p.mc;
    domain(rd, "solver", [&] {
        p.solver.validate();
        return 0;
    });

    if (const json* s = rd.find(root, "shape")) {
        rd.only_keys(*s, "shape", {"h", "h_other"});
        if (const json* v = rd.find(*s, "h")) p.h = rd.numbers(*v, "shape.h");
        if (const json* v = rd.find(*s, "h_other")) p.h_other = rd.numbers(*v, "shape.h_other");
    }
    if (const json* s = rd.find(root, "verify")) {
        rd.only_keys(*s, "verify", {"f", "steps", "t"});
        if (const json* v = rd.find(*s, "f")) p.f = rd.numbers(*v, "verify.f");
        if (const json* v = rd.find(*s, "steps")) p.steps = rd.numbers(*v, "verify.steps");
        if (const json* v = rd.find(*s, "t")) p.t = rd.number(*v, "verify.t");
        if (!(p.t > 0.0 && p.t < 1.0)) rd.invalid("verify.t", "must lie in (0, 1)");
        if (p.steps && p.steps->size() < 3) rd.invalid("verify.steps", "needs at least three step sizes");
    }
    if (const json* s = rd.find(root, "counterexample")) {
        rd.only_keys(*s, "counterexample", {"b", "kind", "rho"});
        if (const json* v = rd.find(*s, "b")) p.b = rd.vector(*v, "counterexample.b", n);
        if (const json* v = rd.find(*s, "kind")) {
            const std::string k = rd.text(*v, "counterexample.kind");
            if (k == "surface") p.kind = MeasureKind::Surface;
            else if (k == "cone") p.kind = MeasureKind::Cone;
            else rd.invalid("counterexample.kind", "expected surface or cone");
        }
        if (const json* v = rd.find(*s, "rho")) p.rho = rd.number(*v, "counterexample.rho");
        if (!(p.rho > 0.0 && p.rho < 1.0)) rd.invalid("counterexample.rho", "must lie in (0, 1)");
    }
    if (const json* s = rd.find(root, "scan")) {
        rd.only_keys(*s, "scan", {"b", "t_min", "t_max", "count"});
        if (const json* v = rd.find(*s, "b")) p.b = rd.vector(*v, "scan.b", n);
        if (const json* v = rd.find(*s, "t_min")) p.scan_min = rd.number(*v, "scan.t_min");
        if (const json* v = rd.find(*s, "t_max")) p.scan_max = rd.number(*v, "scan.t_max");
        if (const json* v = rd.find(*s, "count")) p.scan_count = static_cast<int>(rd.integer(*v, "scan.count"));
        if (!(p.scan_min > 0.0 && p.scan_max > p.scan_min)) rd.invalid("scan", "needs 0 < t_min < t_max");
        if (p.scan_count < 2 || p.scan_count > 100000) rd.invalid("scan.count", "must lie between 2 and 100000");
    }
    if (p.b) {
        rd.unit_rows(Mat(p.b->transpose()), "counterexample.b");
        Mat row(1, n);
        row.row(0) = p.b->transpose();
        domain(rd, "counterexample.b", [&] { return DirectionSet::create(built, row); });
    }

    // Task requirements.
    const bool needs_omega = p.task != Task::Counterexample;
    if (needs_omega && p.omega.rows() == 0) rd.invalid("omega", "required for problem " + std::string(task_name(p.task)));
    if ((p.task == Task::Surface || p.task == Task::Log) && !rd.find(root, "mu")) {
        rd.invalid("mu", "required for problem " + std::string(task_name(p.task)));
    }
    if (p.task == Task::Measure || p.task == Task::Verify) {
        if (p.h.empty()) rd.invalid("shape.h", "required for problem " + std::string(task_name(p.task)));
    }
    if (p.task == Task::Counterexample && !p.b) rd.invalid("counterexample.b", "required for problem counterexample");
    const int m = static_cast<int>(p.omega.rows());
    auto check_support = [&](const std::vector<double>& h, const std::string& path) {
        if (static_cast<int>(h.size()) != m) rd.invalid(path, "length differs from the number of directions");
        for (std::size_t k = 0; k < h.size(); ++k) {
            if (!(h[k] > 0.0)) rd.invalid(path + "[" + std::to_string(k) + "]", "support values must be positive");
        }
    };
    if (!p.h.empty()) check_support(p.h, "shape.h");
    if (p.h_other) check_support(*p.h_other, "shape.h_other");
    if (p.f && static_cast<int>(p.f->size()) != m) rd.invalid("verify.f", "length differs from the number of directions");
    return p;
}

ojson estimate_json(const MCEstimate& e) { return ojson{{"value", e.value}, {"std_err", e.std_err}}; }

ojson measure_json(const DiscreteMeasure& m) {
    ojson out{{"weights", m.weights}};
    if (m.std_errs) out["std_errs"] = *m.std_errs;
    return out;
}

std::string_view check_kind_name(CheckKind k) {
    switch (k) {
        case CheckKind::Inequality: return "inequality";
        case CheckKind::StrictInequality: return "strict_inequality";
        case CheckKind::Equality: return "equality";
        case CheckKind::Derivative: return "derivative";
        case CheckKind::Tolerance: return "tolerance";
    }
    return "inequality";
}

ojson check_json(const CheckReport& r) {
    return ojson{{"name", r.name},
                 {"kind", check_kind_name(r.kind)},
                 {"lhs", estimate_json(r.lhs)},
                 {"rhs", estimate_json(r.rhs)},
                 {"sigma", r.sigma},
                 {"margin", r.margin},
                 {"passed", r.passed},
                 {"precondition", r.precondition},
                 {"digest", r.digest}};
}

std::string format_row(std::initializer_list<double> values) {
    std::string row;
    char buf[40];
    bool first = true;
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        if (!first) row += ',';
        row += buf;
        first = false;
    }
    return row + "\n";
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::string out = "iteration,phase,objective,residual,gamma,gamma_err,c,c_err\n";
    for (const auto& r : trace) {
        out += format_row({static_cast<double>(r.iteration), static_cast<double>(r.phase), r.objective, r.residual,
                           r.gamma, r.gamma_err, r.c, r.c_err});
    }
    return out;
}

struct Output {
    ojson result;
    std::string status = "ok";
    int exit_code = 0;
    std::vector<std::pair<std::string, std::string>> files;  // extra files
};

Output solve_task(const ProblemFile& p) {
    const ConvexCone cone = p.cone();
    const DirectionSet omega = p.directions();
    const DiscreteMeasure mu = DiscreteMeasure::exact(omega, p.mu);
    const SolveReport rep = p.task == Task::Surface ? solve_gaussian_minkowski(cone, omega, mu, p.solver)
                                                    : solve_log_minkowski(cone, omega, mu, p.solver);
    Output out;
    out.result = ojson{{"converged", rep.converged},
                       {"iterations", rep.iterations},
                       {"solution_h", rep.solution_h.values()},
                       {"residuals", rep.residuals},
                       {"max_residual", rep.max_residual},
                       {"c", estimate_json(rep.c_value)},
                       {"gamma", estimate_json(rep.gamma)},
                       {"covolume", estimate_json(rep.covolume)},
                       {"surface", measure_json(rep.surface)},
                       {"warnings", rep.warnings}};
    if (!rep.converged) {
        out.status = "not_converged";
        out.exit_code = 2;
    }
    out.files.emplace_back("trace.csv", trace_csv(rep.trace));
    return out;
}

Output measure_task(const ProblemFile& p) {
    const MCConfig mc = p.sampling();
    const WulffShape k = make_wulff(p.cone(), p.directions(), SupportVector(p.h));
    std::vector<bool> active;
    for (int i = 0; i < k.facet_count(); ++i) active.push_back(k.facet_active(i));
    const ConeVolume cv = gauss_volume_cone(k.cone(), mc);
    Output out;
    out.result = ojson{{"effective_h", k.effective_h().values()},
                       {"active", active},
                       {"cone_volume", ojson{{"estimate", estimate_json(cv.estimate)},
                                             {"analytic", cv.analytic ? ojson(*cv.analytic) : ojson(nullptr)}}},
                       {"gamma", estimate_json(gauss_volume(k, mc))},
                       {"covolume", estimate_json(covolume(k, mc))},
                       {"surface", measure_json(surface_measure(k, mc))},
                       {"cone_measure", measure_json(cone_measure(k, mc))},
                       {"mixed_volume_self", estimate_json(mixed_volume(k, k, mc))}};
    if (!p.mu.empty()) {
        const DiscreteMeasure mu = DiscreteMeasure::exact(k.omega(), p.mu);
        out.result["normalization_c"] = estimate_json(normalization_c(k, mu, mc));
        out.result["functional_I"] = estimate_json(functional_I(mu, k.defining_h(), k.cone(), mc));
        out.result["functional_L"] = estimate_json(functional_L(mu, k.defining_h(), k.cone(), mc));
    }
    return out;
}

Output verify_task(const ProblemFile& p) {
    const MCConfig mc = p.sampling();
    const WulffShape k = make_wulff(p.cone(), p.directions(), SupportVector(p.h));
    const std::vector<double> f = p.f ? *p.f : std::vector<double>(static_cast<size_t>(k.facet_count()), 1.0);
    std::vector<CheckReport> checks;
    checks.push_back(check_variational_volume(k, f, p.steps ? *p.steps : default_steps(k, f, false), mc));
    checks.push_back(check_variational_log(k, f, p.steps ? *p.steps : default_steps(k, f, true), mc));
    checks.push_back(check_cone_volume_bound(k, mc));
    checks.push_back(check_mixed_volume_bound(k, mc));
    if (p.h_other) {
        const WulffShape l = with_support(k, SupportVector(*p.h_other));
        checks.push_back(check_minkowski_inequality(k, l, mc));
        checks.push_back(check_mixed_minkowski(k, l, mc));
        const EhrhardReport e = check_ehrhard_wulff(k, l, p.t, mc);
        checks.push_back(e.ehrhard);
        checks.push_back(e.log_concavity);
    }
    Output out;
    ojson list = ojson::array();
    bool all = true;
    for (const auto& c : checks) {
        list.push_back(check_json(c));
        all = all && c.passed;
    }
    out.result = ojson{{"all_passed", all}, {"checks", list}};
    if (!all) {
        out.status = "check_failed";
        out.exit_code = 1;
    }
    return out;
}

Output counterexample_task(const ProblemFile& p) {
    const MCConfig mc = p.sampling();
    const ConvexCone cone = p.cone();
    const NonUniquenessPair pair = find_nonuniqueness(cone, *p.b, p.kind, mc, p.rho);
    const double vol_sigma = std::hypot(pair.gamma_k.std_err, pair.gamma_l.std_err);
    const CheckReport uniq = uniqueness_compare(pair.k, pair.l, 3.0 * vol_sigma, 0.02, mc);
    Output out;
    out.result = ojson{{"kind", p.kind == MeasureKind::Surface ? "surface" : "cone"},
                       {"rho", p.rho},
                       {"t1", pair.t1},
                       {"t2", pair.t2},
                       {"t_peak", pair.t_peak},
                       {"peak_value", pair.peak_value},
                       {"common_value", pair.common_value},
                       {"measure_k", estimate_json(pair.measure_k)},
                       {"measure_l", estimate_json(pair.measure_l)},
                       {"gamma_k", estimate_json(pair.gamma_k)},
                       {"gamma_l", estimate_json(pair.gamma_l)},
                       {"shapes_distinct", pair.t2 - pair.t1 > 0.1 * pair.t_peak},
                       {"volumes_distinct", std::abs(pair.gamma_k.value - pair.gamma_l.value) > 3.0 * vol_sigma},
                       {"multimodal", pair.multimodal},
                       {"uniqueness", check_json(uniq)}};
    out.files.emplace_back("scan.csv", emit_scan(cone, *p.b, log_grid(p.scan_min, p.scan_max, p.scan_count), mc));
    return out;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    os << content;
    os.close();
    if (!os) fail(ErrorCode::IoError, "cannot write " + path.string());
}

json to_json(const ProblemFile& p) {
    auto rows = [](const Mat& m) {
        json a = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_std(m.row(r).transpose()));
        return a;
    };
    json j;
    j["schema"] = kSchemaVersion;
    j["problem"] = task_name(p.task);
    j["dimension"] = p.dimension;
    j["cone"] = {{"generators", rows(p.generators)}, {"normals", rows(p.normals)}};
    if (p.ref_dir) j["cone"]["ref_dir"] = to_std(*p.ref_dir);
    if (p.omega.rows() > 0) j["omega"] = rows(p.omega);
    if (!p.mu.empty() || (p.task == Task::Surface || p.task == Task::Log)) j["mu"] = p.mu;
    j["seed"] = p.seed;
    j["mc"] = {{"samples", p.mc.n_samples}, {"batch_size", p.mc.batch_size}, {"antithetic", p.mc.antithetic}};
    j["solver"] = {{"method", p.solver.method == SolveMethod::Gradient ? "gradient" : "fixed_point"},
                   {"max_iters", p.solver.max_iters},
                   {"step_init", p.solver.step_init},
                   {"armijo_c", p.solver.armijo_c},
                   {"damping", p.solver.damping},
                   {"mc_schedule", p.solver.mc_schedule},
                   {"tol_residual", p.solver.tol_residual},
                   {"normalized", p.solver.normalized}};
    if (p.solver.initial_h) j["solver"]["initial_h"] = *p.solver.initial_h;
    if (!p.h.empty()) j["shape"]["h"] = p.h;
    if (p.h_other) j["shape"]["h_other"] = *p.h_other;
    j["verify"] = {{"t", p.t}};
    if (p.f) j["verify"]["f"] = *p.f;
    if (p.steps) j["verify"]["steps"] = *p.steps;
    j["counterexample"] = {{"kind", p.kind == MeasureKind::Surface ? "surface" : "cone"}, {"rho", p.rho}};
    if (p.b) j["counterexample"]["b"] = to_std(*p.b);
    j["scan"] = {{"t_min", p.scan_min}, {"t_max", p.scan_max}, {"count", p.scan_count}};
    return j;
}

}  // namespace

ConvexCone ProblemFile::cone() const { return build_cone(generators, normals, ref_dir); }

DirectionSet ProblemFile::directions() const { return DirectionSet::create(cone(), omega); }

MCConfig ProblemFile::sampling() const { return mc.with_seed(seed); }

ProblemFile parse_problem_text(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // Byte offset to line number.
        int line = 1;
        const std::size_t end = std::min<std::size_t>(e.byte, text.size());
        for (std::size_t k = 0; k + 1 < end; ++k) line += text[k] == '\n';
        // The library message reads "... parse error at line L, column C: detail".
        const std::string what = e.what();
        const auto at = what.find("at line ");
        if (at != std::string::npos) fail(ErrorCode::ParseError, what.substr(at + 3));
        fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
    }
    const LineMap lines(text);
    return parse_json(root, &lines);
}

ProblemFile parse_problem(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorCode::IoError, "cannot open " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_problem_text(ss.str());
}

ProblemFile override_field(const ProblemFile& problem, std::string_view key, std::string_view value) {
    json j = to_json(problem);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = std::string(value);
    }
    json* node = &j;
    std::string_view rest = key;
    while (true) {
        const auto dot = rest.find('.');
        const std::string part(rest.substr(0, dot));
        if (part.empty()) fail(ErrorCode::ValidationError, "empty component in override key '" + std::string(key) + "'");
        if (dot == std::string_view::npos) {
            (*node)[part] = parsed;
            break;
        }
        node = &(*node)[part];
        if (!node->is_object() && !node->is_null()) {
            fail(ErrorCode::ValidationError, "override key '" + std::string(key) + "' descends into a non-object");
        }
        rest = rest.substr(dot + 1);
    }
    return parse_json(j, nullptr);
}

std::string canonical_json(const ProblemFile& problem) { return to_json(problem).dump(); }

std::string problem_digest(const ProblemFile& problem) {
    Digest d;
    d.add(canonical_json(problem)).add(tool_version());
    return d.hex();
}

std::filesystem::path default_run_root() {
    if (const char* env = std::getenv("GPC_RUN_ROOT"); env && *env) return env;
    return "runs";
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotConverged: return 2;
        case ErrorCode::InfeasibleWeight: return 3;
        case ErrorCode::InvalidInput:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::NotUnitVector:
        case ErrorCode::NotPointed:
        case ErrorCode::NotFullDimensional:
        case ErrorCode::InconsistentDualData:
        case ErrorCode::BadReferenceDirection:
        case ErrorCode::DirectionNotInterior:
        case ErrorCode::NonPositiveSupport:
        case ErrorCode::DirectionOutsideCone:
        case ErrorCode::MismatchedOmega:
        case ErrorCode::EmptyOmegaC:
        case ErrorCode::DegenerateMeasure:
        case ErrorCode::StepTooLarge:
        case ErrorCode::PeakNotFound:
        case ErrorCode::ParseError:
        case ErrorCode::ValidationError: return 4;
        default: return 1;
    }
}

RunRecord run(const ProblemFile& problem, const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    static std::atomic<int> counter{0};

    RunRecord rec;
    rec.digest = problem_digest(problem);
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();

    Output out;
    switch (problem.task) {
        case Task::Surface:
        case Task::Log: out = solve_task(problem); break;
        case Task::Measure: out = measure_task(problem); break;
        case Task::Verify: out = verify_task(problem); break;
        case Task::Counterexample: out = counterexample_task(problem); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ojson report{{"schema", kSchemaVersion},
                 {"tool", "gpc"},
                 {"version", tool_version()},
                 {"digest", rec.digest},
                 {"problem", task_name(problem.task)},
                 {"seed", problem.seed},
                 {"status", out.status},
                 {"result", out.result}};
    rec.report_json = report.dump(2) + "\n";
    rec.exit_code = out.exit_code;

    std::vector<std::string> names{"problem.json", "report.json"};
    for (const auto& [name, _] : out.files) names.push_back(name);
    const ojson run_info{{"digest", rec.digest},       {"version", tool_version()}, {"started", started},
                         {"finished", utc_now()},      {"wall_time_s", wall},       {"exit_code", rec.exit_code},
                         {"files", names}};

    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create run root " + root.string() + ": " + ec.message());
    rec.directory = root / rec.digest;
    const fs::path tmp = root / (".tmp-" + rec.digest + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    try {
        fs::create_directory(tmp);
        write_file(tmp / "problem.json", to_json(problem).dump(2) + "\n");
        write_file(tmp / "report.json", rec.report_json);
        for (const auto& [name, content] : out.files) write_file(tmp / name, content);
        write_file(tmp / "run.json", run_info.dump(2) + "\n");
        fs::rename(tmp, rec.directory, ec);
        if (ec) {
            // Another writer got there first; its contents are equivalent.
            if (!fs::exists(rec.directory / "report.json")) {
                fail(ErrorCode::IoError, "cannot publish run directory: " + ec.message());
            }
            fs::remove_all(tmp);
            rec.reused = true;
        }
    } catch (...) {
        fs::remove_all(tmp, ec);
        throw;
    }
    return rec;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi > lo) || count < 2) fail(ErrorCode::InvalidInput, "log grid needs 0 < lo < hi and count >= 2");
    std::vector<double> t(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k) t[static_cast<size_t>(k)] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (count - 1));
    t.front() = lo;
    t.back() = hi;
    return t;
}

std::string emit_scan(const ConvexCone& cone, const Vec& b, const std::vector<double>& t_grid, const MCConfig& mc) {
    Mat row(1, cone.dim());
    row.row(0) = b.transpose();
    const DirectionSet omega = DirectionSet::create(cone, row);
    // g(t) = e^{-t²/2} ∫_{tA} e^{-|x|²/2} dx = (2π)^{n/2} S(K_t, b).
    const double scale = std::pow(2.0 * std::numbers::pi, 0.5 * cone.dim());
    std::string out = "t,g,g_err,h,h_err,S,S_err,C,C_err\n";
    for (double t : t_grid) {
        if (!(t > 0.0)) fail(ErrorCode::NonPositiveSupport, "scan values must be positive");
        const MCEstimate prof = scalar_profile(cone, b, MeasureKind::Surface, t, mc);
        const MCEstimate s = facet_surface(make_wulff(cone, omega, SupportVector({t})), 0, mc);
        out += format_row({t, scale * prof.value, scale * prof.std_err, t * scale * prof.value,
                           t * scale * prof.std_err, s.value, s.std_err, t * s.value, t * s.std_err});
    }
    return out;
}

}  // namespace gpc
