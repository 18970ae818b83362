// C interface over the pricing core: opaque run handles, status codes,
// thread-local error text.  Exceptions never cross the language boundary.
#include "swing/swing.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "../core/config.hpp"
#include "../core/lattice.hpp"
#include "../core/mc.hpp"
#include "../core/solver.hpp"
#include "../core/verify.hpp"

struct swing_run {
    swing::RunConfig cfg;
    std::optional<swing::LatticeModel> model;
    std::optional<swing::VolumeGrid> vgrid;
    std::optional<swing::SurfaceBundle> bundle;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

swing_status fail(swing_status code, const std::string& msg) {
    set_error(msg);
    return code;
}

// Configuration text is rejected with one of two prefixes; everything else
// raised during parsing is a value problem, not a syntax problem.
swing_status classify_config_error(const std::string& msg) {
    if (msg.rfind("config is not valid JSON", 0) == 0) return SWING_EPARSE;
    if (msg.rfind("cannot open", 0) == 0) return SWING_EIO;
    return SWING_EINVAL;
}

char* copy_out(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

swing_run* finish_create(swing::RunConfig cfg, swing_status* status) {
    auto run = std::make_unique<swing_run>();
    run->cfg = std::move(cfg);
    run->model = swing::build_lattice(run->cfg.params);
    const std::vector<std::string> problems = swing::validate(*run->model);
    if (!problems.empty()) {
        std::string msg = "model failed validation:";
        for (const std::string& p : problems) msg += "\n  - " + p;
        set_error(msg);
        if (status) *status = SWING_EVALIDATE;
        return nullptr;
    }
    run->vgrid = swing::VolumeGrid(run->cfg.L, run->model->tgrid, run->cfg.M);
    if (status) *status = SWING_OK;
    return run.release();
}

swing_run* create_guarded(const std::function<swing::RunConfig()>& load, swing_status* status) {
    try {
        return finish_create(load(), status);
    } catch (const std::invalid_argument& e) {
        const swing_status code = classify_config_error(e.what());
        set_error(e.what());
        if (status) *status = code;
        return nullptr;
    } catch (const std::exception& e) {
        set_error(e.what());
        if (status) *status = SWING_EINTERNAL;
        return nullptr;
    }
}

swing_status ensure_solved(swing_run* run) {
    if (run->bundle) return SWING_OK;
    run->bundle = swing::solve_all(*run->model, *run->vgrid);
    return SWING_OK;
}

// Wrap a handle-taking operation: null checks, exception -> status mapping.
template <typename Fn>
swing_status guarded(swing_run* run, Fn&& fn) {
    if (!run) return fail(SWING_EINVAL, "run handle is null");
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(SWING_EINVAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SWING_EINTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SWING_EINTERNAL, e.what());
    }
}

} // namespace

extern "C" {

const char* swing_version(void) { return "1.0.0"; }

const char* swing_last_error(void) { return g_last_error.c_str(); }

void swing_string_free(char* s) { delete[] s; }

swing_run* swing_run_create_from_file(const char* path, swing_status* status) {
    if (!path) {
        set_error("path is null");
        if (status) *status = SWING_EINVAL;
        return nullptr;
    }
    const std::string p = path;
    return create_guarded([&p] { return swing::load_config(p); }, status);
}

swing_run* swing_run_create_from_json(const char* json_text, swing_status* status) {
    if (!json_text) {
        set_error("json_text is null");
        if (status) *status = SWING_EINVAL;
        return nullptr;
    }
    const std::string text = json_text;
    return create_guarded([&text] { return swing::parse_config(text); }, status);
}

void swing_run_destroy(swing_run* run) { delete run; }

swing_status swing_run_set_seed(swing_run* run, uint64_t seed) {
    return guarded(run, [&] {
        run->cfg.seed = seed;
        return SWING_OK;
    });
}

swing_status swing_run_set_paths(swing_run* run, long long n_paths) {
    return guarded(run, [&] {
        if (n_paths < 2) return fail(SWING_EINVAL, "n_paths must be at least 2");
        run->cfg.n_paths = n_paths;
        return SWING_OK;
    });
}

const char* swing_run_out_dir(const swing_run* run) {
    return run ? run->cfg.out_dir.c_str() : nullptr;
}

swing_status swing_run_solve(swing_run* run) {
    return guarded(run, [&] { return ensure_solved(run); });
}

swing_status swing_run_export_surface_csv(swing_run* run, const char* path) {
    return guarded(run, [&]() -> swing_status {
        if (!path) return fail(SWING_EINVAL, "path is null");
        ensure_solved(run);
        std::ofstream out(path, std::ios::binary);
        if (!out) return fail(SWING_EIO, std::string("cannot open for writing: ") + path);
        swing::export_csv(*run->bundle, *run->model, out);
        out.flush();
        if (!out) return fail(SWING_EIO, std::string("write failed: ") + path);
        return SWING_OK;
    });
}

swing_status swing_run_import_surface_csv(swing_run* run, const char* path) {
    return guarded(run, [&]() -> swing_status {
        if (!path) return fail(SWING_EINVAL, "path is null");
        std::ifstream in(path, std::ios::binary);
        if (!in) return fail(SWING_EIO, std::string("cannot open surface CSV: ") + path);
        try {
            run->bundle = swing::import_csv(*run->model, *run->vgrid, in);
        } catch (const std::invalid_argument& e) {
            return fail(SWING_EPARSE, e.what());
        } catch (const std::out_of_range& e) {
            return fail(SWING_EPARSE, std::string("surface CSV numeric field out of range: ") + e.what());
        }
        return SWING_OK;
    });
}

swing_status swing_run_solve_metadata_json(swing_run* run, char** out) {
    return guarded(run, [&]() -> swing_status {
        if (!out) return fail(SWING_EINVAL, "out is null");
        ensure_solved(run);
        const std::string doc =
            swing::solve_metadata_json(run->cfg, *run->model, *run->vgrid, *run->bundle, "surface.csv");
        *out = copy_out(doc);
        if (!*out) return fail(SWING_EINTERNAL, "out of memory");
        return SWING_OK;
    });
}

swing_status swing_run_verify_json(swing_run* run, char** out, int* all_pass) {
    return guarded(run, [&]() -> swing_status {
        if (!out) return fail(SWING_EINVAL, "out is null");
        ensure_solved(run);
        const std::vector<swing::CheckResult> checks =
            swing::run_all_checks(run->cfg, *run->model, *run->vgrid, *run->bundle);
        const std::string doc = swing::verify_report_json(run->cfg, *run->model, *run->vgrid, checks);
        *out = copy_out(doc);
        if (!*out) return fail(SWING_EINTERNAL, "out of memory");
        if (all_pass) *all_pass = swing::all_pass(checks) ? 1 : 0;
        return SWING_OK;
    });
}

swing_status swing_run_price_json(swing_run* run, char** out) {
    return guarded(run, [&]() -> swing_status {
        if (!out) return fail(SWING_EINVAL, "out is null");
        if (run->cfg.n_paths < 2) return fail(SWING_EINVAL, "n_paths must be at least 2");
        ensure_solved(run);
        const swing::PriceResult result =
            swing::price(*run->model, *run->vgrid, *run->bundle, run->cfg.policy_rule,
                         run->cfg.eps_switch, run->cfg.y0, run->cfg.n_paths, run->cfg.seed);
        const swing::CheckResult surface_summary = swing::bspde_residual(
            *run->model, *run->vgrid, *run->bundle,
            swing::effective_bspde_budget(run->cfg, *run->model, *run->vgrid));
        const std::string doc = swing::price_report_json(run->cfg, *run->model, *run->vgrid,
                                                         *run->bundle, result, surface_summary);
        *out = copy_out(doc);
        if (!*out) return fail(SWING_EINTERNAL, "out of memory");
        return SWING_OK;
    });
}

swing_status swing_run_value(swing_run* run, double* out) {
    return guarded(run, [&]() -> swing_status {
        if (!out) return fail(SWING_EINVAL, "out is null");
        ensure_solved(run);
        const int j0 = swing::level_of(*run->vgrid, run->cfg.y0);
        *out = run->bundle->j_at(0, 0, j0);
        return SWING_OK;
    });
}

swing_status swing_run_value_at(swing_run* run, double t, int node, double y, double* out) {
    return guarded(run, [&]() -> swing_status {
        if (!out) return fail(SWING_EINVAL, "out is null");
        ensure_solved(run);
        *out = swing::interp_value(*run->bundle, *run->model, t, node, y);
        return SWING_OK;
    });
}

} // extern "C"
