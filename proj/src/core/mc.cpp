#include "mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace swing {

std::string to_string(MapKind kind) { return kind == MapKind::Optimal ? "optimal" : "zero"; }

MapKind map_kind_from_string(const std::string& s) {
    if (s == "optimal") return MapKind::Optimal;
    if (s == "zero") return MapKind::Zero;
    throw std::invalid_argument("unknown martingale map kind: " + s);
}

std::vector<int> sample_path(const LatticeModel& model, uint64_t seed, uint64_t path) {
    const int N = model.tgrid.N;
    std::vector<int> nodes(N + 1);
    nodes[0] = 0;
    for (int i = 0; i < N; ++i) {
        const LatticeNode& node = model.steps[i][nodes[i]];
        const double u = draw_unit(seed, path, static_cast<uint64_t>(i));
        double cum = 0.0;
        int next = node.arcs.back().to;
        for (const Arc& a : node.arcs) {
            cum += a.p;
            if (u < cum) {
                next = a.to;
                break;
            }
        }
        nodes[i + 1] = next;
    }
    return nodes;
}

namespace {

// Streaming mean/variance (Welford); deterministic for a fixed visit order.
struct Accumulator {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double max_value = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
        max_value = (n == 1) ? x : std::max(max_value, x);
    }
    Estimate estimate() const {
        Estimate e;
        e.mean = mean;
        e.std_error = (n > 1) ? std::sqrt(m2 / (n - 1) / n) : 0.0;
        return e;
    }
};

} // namespace

Estimate simulate_primal(const LatticeModel& model, const VolumeGrid& vgrid,
                         const PolicyTable& policy, int start_level, long long n_paths,
                         uint64_t seed) {
    if (n_paths < 2) throw std::invalid_argument("simulate_primal: need at least 2 paths");
    if (start_level < 0 || start_level > vgrid.M)
        throw std::invalid_argument("simulate_primal: start level outside the volume grid");
    const int N = model.tgrid.N;
    const int M = vgrid.M;
    const double gain_scale = vgrid.L * model.tgrid.dt;

    Accumulator acc;
    for (long long p = 0; p < n_paths; ++p) {
        int node = 0;
        int level = start_level;
        double reward = 0.0;
        for (int i = 0; i < N; ++i) {
            if (policy.at(i, node, level, M)) {
                if (level == 0)
                    throw std::logic_error("simulate_primal: policy exercised with no volume left");
                reward += gain_scale * model.steps[i][node].payoff;
                --level;
            }
            const LatticeNode& cur = model.steps[i][node];
            const double u = draw_unit(seed, static_cast<uint64_t>(p), static_cast<uint64_t>(i));
            double cum = 0.0;
            int next = cur.arcs.back().to;
            for (const Arc& a : cur.arcs) {
                cum += a.p;
                if (u < cum) {
                    next = a.to;
                    break;
                }
            }
            node = next;
        }
        acc.add(reward);
    }
    return acc.estimate();
}

DualEstimate dual_bound(const LatticeModel& model, const VolumeGrid& vgrid,
                        const SurfaceBundle& bundle, int start_level, long long n_paths,
                        uint64_t seed, MapKind map) {
    if (n_paths < 2) throw std::invalid_argument("dual_bound: need at least 2 paths");
    if (start_level < 0 || start_level > vgrid.M)
        throw std::invalid_argument("dual_bound: start level outside the volume grid");
    const int N = model.tgrid.N;
    const int M = vgrid.M;
    const int W = M + 1;
    const int lw = start_level + 1; // inner DP level window
    const double gain_scale = vgrid.L * model.tgrid.dt;

    Accumulator acc;
    std::vector<double> u_next(lw), u_cur(lw), cont(lw);
    std::vector<int> nodes;
    for (long long p = 0; p < n_paths; ++p) {
        nodes = sample_path(model, seed, static_cast<uint64_t>(p));
        std::fill(u_next.begin(), u_next.end(), 0.0);
        for (int i = N - 1; i >= 0; --i) {
            const LatticeNode& node = model.steps[i][nodes[i]];
            const double gain = gain_scale * node.payoff;
            const double* j_next = &bundle.J[i + 1][static_cast<size_t>(nodes[i + 1]) * W];
            if (map == MapKind::Optimal) {
                for (int j = 0; j < lw; ++j) {
                    double c = 0.0;
                    for (const Arc& a : node.arcs)
                        c += a.p * bundle.J[i + 1][static_cast<size_t>(a.to) * W + j];
                    cont[j] = c;
                }
                // Candidate values keep the penalty as (carried - realized),
                // which is exactly 0 once the inner DP locks onto the
                // surface; ties go to exercising, mirroring the solver.
                u_cur[0] = cont[0] + (u_next[0] - j_next[0]);
                for (int j = 1; j < lw; ++j) {
                    const double stay = cont[j] + (u_next[j] - j_next[j]);
                    const double go = (gain + cont[j - 1]) + (u_next[j - 1] - j_next[j - 1]);
                    u_cur[j] = go >= stay ? go : stay;
                }
            } else {
                u_cur[0] = u_next[0];
                for (int j = 1; j < lw; ++j) {
                    const double stay = u_next[j];
                    const double go = gain + u_next[j - 1];
                    u_cur[j] = go >= stay ? go : stay;
                }
            }
            u_next.swap(u_cur);
        }
        acc.add(u_next[start_level]);
    }
    DualEstimate out;
    out.estimate = acc.estimate();
    out.max_path_value = acc.max_value;
    out.map = map;
    return out;
}

PriceResult price(const LatticeModel& model, const VolumeGrid& vgrid,
                  const SurfaceBundle& bundle, PolicyRule rule, double eps_switch, double y0,
                  long long n_paths, uint64_t seed) {
    PriceResult r;
    r.policy = extract_policy(model, vgrid, bundle, rule, eps_switch);
    r.start_level = level_of(vgrid, y0);
    r.primal = simulate_primal(model, vgrid, r.policy, r.start_level, n_paths, seed);
    r.dual = dual_bound(model, vgrid, bundle, r.start_level, n_paths, seed, MapKind::Optimal);
    r.gap = r.dual.estimate.mean - r.primal.mean;
    return r;
}

} // namespace swing
