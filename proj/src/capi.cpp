#include "gpc.h"

#include "gpc/cli_io.hpp"
#include "gpc/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

struct gpc_cone {
    gpc::ConvexCone cone;
};

struct gpc_shape {
    gpc::WulffShape shape;
};

struct gpc_problem {
    gpc::ProblemFile problem;
};

struct gpc_run {
    gpc::RunRecord record;
    std::string directory;
};

namespace {

thread_local std::string last_error;

// Status values mirror ErrorCode, shifted by one to leave 0 for success.
gpc_status status_of(gpc::ErrorCode code) { return static_cast<gpc_status>(static_cast<int>(code) + 1); }

template <class F>
gpc_status guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return GPC_OK;
    } catch (const gpc::Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return GPC_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return GPC_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) gpc::fail(gpc::ErrorCode::InvalidInput, std::string(what) + " must not be null");
}

gpc::Mat rows(const double* data, std::size_t count, int dim) {
    require(data, "matrix data");
    return gpc::rows_from({data, count * static_cast<std::size_t>(dim)}, dim);
}

char* duplicate(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

gpc::MCConfig sampling(std::uint64_t seed, std::int64_t samples) {
    gpc::MCConfig mc;
    mc.seed = seed;
    mc.n_samples = samples;
    mc.validate();
    return mc;
}

}  // namespace

extern "C" {

const char* gpc_version(void) { return gpc::tool_version().data(); }

const char* gpc_status_name(gpc_status status) {
    if (status == GPC_OK) return "Ok";
    if (status < GPC_OK || status > GPC_INTERNAL) return "Unknown";
    return gpc::error_code_name(static_cast<gpc::ErrorCode>(static_cast<int>(status) - 1)).data();
}

const char* gpc_last_error(void) { return last_error.c_str(); }

int gpc_exit_code(gpc_status status) {
    if (status == GPC_OK) return 0;
    if (status < GPC_OK || status > GPC_INTERNAL) return 1;
    return gpc::exit_code_for(static_cast<gpc::ErrorCode>(static_cast<int>(status) - 1));
}

void gpc_string_free(char* s) { std::free(s); }

gpc_status gpc_cone_create(int dim, const double* generators, size_t n_generators, const double* normals,
                           size_t n_normals, const double* ref_dir, gpc_cone** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        if (dim < 2 || dim > gpc::kMaxDim) gpc::fail(gpc::ErrorCode::InvalidInput, "unsupported dimension");
        std::optional<gpc::Vec> ref;
        if (ref_dir) ref = gpc::vec_from({ref_dir, static_cast<std::size_t>(dim)});
        *out = new gpc_cone{gpc::build_cone(rows(generators, n_generators, dim), rows(normals, n_normals, dim), ref)};
    });
}

void gpc_cone_free(gpc_cone* cone) { delete cone; }

int gpc_cone_dim(const gpc_cone* cone) { return cone ? cone->cone.dim() : 0; }

gpc_status gpc_cone_volume_exact(const gpc_cone* cone, double* value, int* known) {
    return guarded([&] {
        require(cone, "cone");
        require(value, "value");
        require(known, "known");
        const auto v = gpc::cone_volume_exact(cone->cone);
        *known = v.has_value();
        *value = v.value_or(0.0);
    });
}

gpc_status gpc_shape_create(const gpc_cone* cone, const double* directions, size_t n_directions, const double* support,
                            gpc_shape** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        require(cone, "cone");
        require(support, "support");
        const int dim = cone->cone.dim();
        const auto omega = gpc::DirectionSet::create(cone->cone, rows(directions, n_directions, dim));
        const gpc::SupportVector h(std::vector<double>(support, support + n_directions));
        *out = new gpc_shape{gpc::make_wulff(cone->cone, omega, h)};
    });
}

void gpc_shape_free(gpc_shape* shape) { delete shape; }

size_t gpc_shape_facet_count(const gpc_shape* shape) {
    return shape ? static_cast<size_t>(shape->shape.facet_count()) : 0;
}

gpc_status gpc_shape_effective_support(const gpc_shape* shape, double* out) {
    return guarded([&] {
        require(shape, "shape");
        require(out, "out");
        const auto& h = shape->shape.effective_h().values();
        std::copy(h.begin(), h.end(), out);
    });
}

gpc_status gpc_shape_radial(const gpc_shape* shape, const double* v, double* rho, size_t* facet) {
    return guarded([&] {
        require(shape, "shape");
        require(v, "v");
        require(rho, "rho");
        const auto hit = gpc::radial(shape->shape, gpc::vec_from({v, static_cast<std::size_t>(shape->shape.dim())}));
        *rho = hit.rho;
        if (facet) *facet = static_cast<size_t>(hit.index);
    });
}

gpc_status gpc_shape_gauss_volume(const gpc_shape* shape, uint64_t seed, int64_t samples, double* value,
                                  double* std_err) {
    return guarded([&] {
        require(shape, "shape");
        require(value, "value");
        const auto e = gpc::gauss_volume(shape->shape, sampling(seed, samples));
        *value = e.value;
        if (std_err) *std_err = e.std_err;
    });
}

gpc_status gpc_shape_covolume(const gpc_shape* shape, uint64_t seed, int64_t samples, double* value, double* std_err) {
    return guarded([&] {
        require(shape, "shape");
        require(value, "value");
        const auto e = gpc::covolume(shape->shape, sampling(seed, samples));
        *value = e.value;
        if (std_err) *std_err = e.std_err;
    });
}

gpc_status gpc_shape_surface_measure(const gpc_shape* shape, uint64_t seed, int64_t samples, double* weights,
                                     double* std_errs) {
    return guarded([&] {
        require(shape, "shape");
        require(weights, "weights");
        const auto s = gpc::surface_measure(shape->shape, sampling(seed, samples));
        for (int i = 0; i < s.size(); ++i) {
            weights[i] = s.weights[static_cast<size_t>(i)];
            if (std_errs) std_errs[i] = s.std_err(i);
        }
    });
}

gpc_status gpc_problem_parse_file(const char* path, gpc_problem** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        require(path, "path");
        *out = new gpc_problem{gpc::parse_problem(path)};
    });
}

gpc_status gpc_problem_parse_string(const char* text, gpc_problem** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        require(text, "text");
        *out = new gpc_problem{gpc::parse_problem_text(text)};
    });
}

void gpc_problem_free(gpc_problem* problem) { delete problem; }

gpc_status gpc_problem_set(gpc_problem* problem, const char* key, const char* value) {
    return guarded([&] {
        require(problem, "problem");
        require(key, "key");
        require(value, "value");
        problem->problem = gpc::override_field(problem->problem, key, value);
    });
}

const char* gpc_problem_task(const gpc_problem* problem) {
    return problem ? gpc::task_name(problem->problem.task).data() : "";
}

gpc_status gpc_problem_digest(const gpc_problem* problem, char** out) {
    return guarded([&] {
        require(problem, "problem");
        require(out, "out");
        *out = duplicate(gpc::problem_digest(problem->problem));
    });
}

gpc_status gpc_problem_canonical(const gpc_problem* problem, char** out) {
    return guarded([&] {
        require(problem, "problem");
        require(out, "out");
        *out = duplicate(gpc::canonical_json(problem->problem));
    });
}

gpc_status gpc_run_problem(const gpc_problem* problem, const char* root, gpc_run** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        require(problem, "problem");
        const std::filesystem::path dir = root ? std::filesystem::path(root) : gpc::default_run_root();
        auto rec = gpc::run(problem->problem, dir);
        std::string d = rec.directory.string();
        *out = new gpc_run{std::move(rec), std::move(d)};
    });
}

void gpc_run_free(gpc_run* run) { delete run; }

const char* gpc_run_directory(const gpc_run* run) { return run ? run->directory.c_str() : ""; }
const char* gpc_run_digest(const gpc_run* run) { return run ? run->record.digest.c_str() : ""; }
const char* gpc_run_report(const gpc_run* run) { return run ? run->record.report_json.c_str() : ""; }
int gpc_run_exit_code(const gpc_run* run) { return run ? run->record.exit_code : 1; }
int gpc_run_reused(const gpc_run* run) { return run ? run->record.reused : 0; }

gpc_status gpc_scan_csv(const gpc_problem* problem, const double* b, double t_min, double t_max, int count,
                        char** csv) {
    return guarded([&] {
        require(problem, "problem");
        require(csv, "csv");
        const auto& p = problem->problem;
        gpc::Vec dir;
        if (b) {
            dir = gpc::vec_from({b, static_cast<std::size_t>(p.dimension)});
        } else if (p.b) {
            dir = *p.b;
        } else {
            gpc::fail(gpc::ErrorCode::ValidationError, "field counterexample.b: required for a scan");
        }
        const double lo = t_min > 0.0 ? t_min : p.scan_min;
        const double hi = t_max > 0.0 ? t_max : p.scan_max;
        const int n = count > 0 ? count : p.scan_count;
        *csv = duplicate(gpc::emit_scan(p.cone(), dir, gpc::log_grid(lo, hi, n), p.sampling()));
    });
}

}  // extern "C"
