// Strict JSON run configuration and deterministic report documents.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "mc.hpp"
#include "policy.hpp"
#include "verify.hpp"

namespace swing {

struct Tolerances {
    double exact = 1e-10;          // float-noise budget for identity checks
    double bspde = -1.0;           // marginal-recursion budget; < 0 = auto scale
    double chain_rule_random = -1.0; // random-control chain-rule budget; < 0 = auto
};

struct RunConfig {
    ModelParams params;
    double L = 1.0;
    int M = -1; // volume levels; -1 = default N+1
    double y0 = 0.0;
    long long n_paths = 10000;
    uint64_t seed = 12345;
    PolicyRule policy_rule = PolicyRule::DpArgmax;
    double eps_switch = 1e-9;
    int random_controls = 20;
    Tolerances tolerances;
    std::string out_dir = "out";
};

// Parses the config document, rejecting unknown fields anywhere in the tree
// (the diagnostic names the offending field).  Numeric model invariants are
// re-validated when the lattice is built.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// FNV-1a 64-bit hash, reported as 16 hex digits.
uint64_t fnv1a64(const std::string& bytes);
// Hash of the effective (post-override) configuration: embedded in every
// output document so reports are traceable to their exact inputs.
std::string config_hash(const RunConfig& cfg);

// One-step-accrual scale L*dt*max(1, max payoff), with a small relative
// cushion so an exactly attained first-order bound still passes.
double bspde_budget_default(const LatticeModel& model, const VolumeGrid& vgrid);

double effective_bspde_budget(const RunConfig& cfg, const LatticeModel& model,
                              const VolumeGrid& vgrid);
double effective_chain_random_budget(const RunConfig& cfg, const LatticeModel& model,
                                     const VolumeGrid& vgrid);

// Every verifier check run on the configured model (and optionally on an
// imported surface instead of a freshly solved one).
std::vector<CheckResult> run_all_checks(const RunConfig& cfg, const LatticeModel& model,
                                        const VolumeGrid& vgrid, const SurfaceBundle& bundle);

// Deterministic JSON documents (2-space indent, sorted keys, trailing
// newline, no timestamps).
std::string verify_report_json(const RunConfig& cfg, const LatticeModel& model,
                               const VolumeGrid& vgrid, const std::vector<CheckResult>& checks);
std::string price_report_json(const RunConfig& cfg, const LatticeModel& model,
                              const VolumeGrid& vgrid, const SurfaceBundle& bundle,
                              const PriceResult& result, const CheckResult& surface_summary);
std::string solve_metadata_json(const RunConfig& cfg, const LatticeModel& model,
                                const VolumeGrid& vgrid, const SurfaceBundle& bundle,
                                const std::string& surface_filename);

bool all_pass(const std::vector<CheckResult>& checks);

} // namespace swing
