// Command-line front end: `solve`, `verify`, and `price` subcommands over the
// shared-library C interface.  Exit codes: 0 success, 1 invalid input,
// 2 verification failure.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "swing/swing.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitVerifyFailed = 2;

struct RunDeleter {
    void operator()(swing_run* r) const { swing_run_destroy(r); }
};
using RunPtr = std::unique_ptr<swing_run, RunDeleter>;

struct StringDeleter {
    void operator()(char* s) const { swing_string_free(s); }
};
using ApiString = std::unique_ptr<char, StringDeleter>;

int fail_invalid(const std::string& context) {
    std::fprintf(stderr, "error: %s: %s\n", context.c_str(), swing_last_error());
    return kExitInvalid;
}

struct CommonArgs {
    std::string config;
    std::string out;
    uint64_t seed = 0;
    long long paths = 0;
    CLI::Option* out_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* paths_opt = nullptr;

    void attach(CLI::App* sub) {
        sub->add_option("--config", config, "JSON configuration file")->required();
        out_opt = sub->add_option("--out", out, "output directory (overrides the config)");
        seed_opt = sub->add_option("--seed", seed, "override the Monte Carlo seed");
        paths_opt = sub->add_option("--paths", paths, "override the Monte Carlo path count");
    }
};

// Create the run, apply overrides, and resolve the output directory.
// Returns null after printing a diagnostic; `exit_code` is set accordingly.
RunPtr open_run(const CommonArgs& args, std::string& out_dir, int& exit_code) {
    swing_status status = SWING_OK;
    RunPtr run(swing_run_create_from_file(args.config.c_str(), &status));
    if (!run) {
        exit_code = fail_invalid("cannot load '" + args.config + "'");
        return nullptr;
    }
    if (args.seed_opt->count() > 0 && swing_run_set_seed(run.get(), args.seed) != SWING_OK) {
        exit_code = fail_invalid("--seed");
        return nullptr;
    }
    if (args.paths_opt->count() > 0 && swing_run_set_paths(run.get(), args.paths) != SWING_OK) {
        exit_code = fail_invalid("--paths");
        return nullptr;
    }
    out_dir = args.out_opt->count() > 0 ? args.out : swing_run_out_dir(run.get());
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "error: cannot create output directory '%s': %s\n", out_dir.c_str(),
                     ec.message().c_str());
        exit_code = kExitInvalid;
        return nullptr;
    }
    exit_code = kExitOk;
    return run;
}

bool write_text_file(const std::string& path, const char* text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    out.flush();
    return static_cast<bool>(out);
}

int cmd_solve(const CommonArgs& args) {
    std::string out_dir;
    int exit_code = kExitOk;
    RunPtr run = open_run(args, out_dir, exit_code);
    if (!run) return exit_code;

    const std::string csv_path = out_dir + "/surface.csv";
    if (swing_run_export_surface_csv(run.get(), csv_path.c_str()) != SWING_OK)
        return fail_invalid("writing '" + csv_path + "'");

    char* meta_raw = nullptr;
    if (swing_run_solve_metadata_json(run.get(), &meta_raw) != SWING_OK)
        return fail_invalid("building surface metadata");
    ApiString meta(meta_raw);
    const std::string meta_path = out_dir + "/surface_metadata.json";
    if (!write_text_file(meta_path, meta.get())) {
        std::fprintf(stderr, "error: cannot write '%s'\n", meta_path.c_str());
        return kExitInvalid;
    }

    double value = 0.0;
    if (swing_run_value(run.get(), &value) != SWING_OK)
        return fail_invalid("reading the start value");
    std::printf("value at start: %.12g\n", value);
    std::printf("wrote %s\n", csv_path.c_str());
    std::printf("wrote %s\n", meta_path.c_str());
    return kExitOk;
}

int cmd_verify(const CommonArgs& args, const std::string& surface, bool have_surface) {
    std::string out_dir;
    int exit_code = kExitOk;
    RunPtr run = open_run(args, out_dir, exit_code);
    if (!run) return exit_code;

    if (have_surface && swing_run_import_surface_csv(run.get(), surface.c_str()) != SWING_OK)
        return fail_invalid("importing surface '" + surface + "'");

    char* report_raw = nullptr;
    int all_pass = 0;
    if (swing_run_verify_json(run.get(), &report_raw, &all_pass) != SWING_OK)
        return fail_invalid("running verification");
    ApiString report(report_raw);

    const std::string report_path = out_dir + "/verify_report.json";
    if (!write_text_file(report_path, report.get())) {
        std::fprintf(stderr, "error: cannot write '%s'\n", report_path.c_str());
        return kExitInvalid;
    }

    int total = 0;
    int failed = 0;
    const nlohmann::json doc = nlohmann::json::parse(report.get());
    for (const auto& check : doc.at("checks")) {
        ++total;
        if (!check.at("pass").get<bool>()) {
            ++failed;
            std::printf("FAIL %s: max residual %.6g exceeds tolerance %.6g\n",
                        check.at("name").get<std::string>().c_str(),
                        check.at("max_residual").get<double>(),
                        check.at("tolerance").get<double>());
        }
    }
    std::printf("verification: %s (%d/%d checks passed)\n", all_pass ? "PASS" : "FAIL",
                total - failed, total);
    std::printf("wrote %s\n", report_path.c_str());
    return all_pass ? kExitOk : kExitVerifyFailed;
}

int cmd_price(const CommonArgs& args) {
    std::string out_dir;
    int exit_code = kExitOk;
    RunPtr run = open_run(args, out_dir, exit_code);
    if (!run) return exit_code;

    char* report_raw = nullptr;
    if (swing_run_price_json(run.get(), &report_raw) != SWING_OK)
        return fail_invalid("pricing");
    ApiString report(report_raw);

    const std::string report_path = out_dir + "/price_report.json";
    if (!write_text_file(report_path, report.get())) {
        std::fprintf(stderr, "error: cannot write '%s'\n", report_path.c_str());
        return kExitInvalid;
    }

    const nlohmann::json doc = nlohmann::json::parse(report.get());
    std::printf("primal %.9g (stderr %.3g) | dual %.9g (stderr %.3g, map %s) | gap %.3g\n",
                doc.at("primal").at("mean").get<double>(),
                doc.at("primal").at("stderr").get<double>(),
                doc.at("dual").at("mean").get<double>(),
                doc.at("dual").at("stderr").get<double>(),
                doc.at("dual").at("map").get<std::string>().c_str(),
                doc.at("gap").get<double>());
    std::printf("wrote %s\n", report_path.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Swing option lattice solver, verifier, and Monte Carlo pricer"};
    app.require_subcommand(1);

    CommonArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "compute and export the value surface");
    solve_args.attach(solve);

    CommonArgs verify_args;
    std::string surface_path;
    CLI::App* verify = app.add_subcommand("verify", "run every consistency check and report");
    verify_args.attach(verify);
    CLI::Option* surface_opt = verify->add_option(
        "--surface", surface_path, "verify this surface CSV instead of a freshly solved one");

    CommonArgs price_args;
    CLI::App* price = app.add_subcommand("price", "Monte Carlo primal estimate and dual bound");
    price_args.attach(price);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    if (app.got_subcommand(solve)) return cmd_solve(solve_args);
    if (app.got_subcommand(verify))
        return cmd_verify(verify_args, surface_path, surface_opt->count() > 0);
    if (app.got_subcommand(price)) return cmd_price(price_args);
    return kExitInvalid;
}
