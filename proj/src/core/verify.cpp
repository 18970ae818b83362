#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace swing {

namespace {

struct Stats {
    double max_abs = 0.0;
    double sum_abs = 0.0;
    long long cells = 0;

    void add_abs(double v) {
        const double a = std::abs(v);
        if (a > max_abs) max_abs = a;
        sum_abs += a;
        ++cells;
    }
    // For one-sided "v <= 0" checks: track the largest signed value and
    // accumulate only positive excess in the mean.
    void add_signed(double v) {
        if (cells == 0 || v > max_abs) max_abs = v;
        sum_abs += std::max(v, 0.0);
        ++cells;
    }
    double mean() const { return cells ? sum_abs / cells : 0.0; }
};

// One-step conditional expectations of next-step rows, accumulated in arc
// order (the same order the solver uses, so shared subexpressions are
// bit-identical).
void expectations(const LatticeNode& node, const std::vector<double>& next, int width,
                  std::vector<double>& out) {
    for (int j = 0; j < width; ++j) {
        double c = 0.0;
        for (const Arc& a : node.arcs) c += a.p * next[static_cast<size_t>(a.to) * width + j];
        out[j] = c;
    }
}

} // namespace

CheckResult bspde_residual(const LatticeModel& model, const VolumeGrid& vgrid,
                           const SurfaceBundle& bundle, double tolerance) {
    if (vgrid.M != bundle.vgrid.M || model.tgrid.N != bundle.tgrid.N)
        throw std::invalid_argument("bspde_residual: surface grid does not match the model");
    const int N = model.tgrid.N;
    const int M = vgrid.M;
    const int W = M + 1;
    const int jr = std::min(M, N); // constrained region: y_j >= 1 - L*T
    const int Wr = jr + 1;
    const double gain_scale = vgrid.L * model.tgrid.dt;

    Stats st;
    std::vector<double> r_next(static_cast<size_t>(model.nodes(N)) * Wr, 0.0);
    st.cells += static_cast<long long>(model.nodes(N)) * Wr; // terminal residuals are 0
    std::vector<double> r_cur, cont(Wr);
    for (int i = N - 1; i >= 0; --i) {
        r_cur.assign(static_cast<size_t>(model.nodes(i)) * Wr, 0.0);
        for (int n = 0; n < model.nodes(i); ++n) {
            const LatticeNode& node = model.steps[i][n];
            expectations(node, r_next, Wr, cont);
            for (int j = 0; j <= jr; ++j) {
                const double lift = gain_scale *
                    std::max(node.payoff + bundle.d_at(i, n, j), 0.0);
                const double r = lift + cont[j];
                r_cur[static_cast<size_t>(n) * Wr + j] = r;
                st.add_abs(r - bundle.J[i][static_cast<size_t>(n) * W + j]);
            }
        }
        r_next.swap(r_cur);
    }
    return make_check("bspde_residual", st.max_abs, st.mean(), tolerance, st.cells);
}

std::vector<CheckResult> boundary_checks(const LatticeModel& model, const VolumeGrid& vgrid,
                                         const SurfaceBundle& bundle) {
    const int N = model.tgrid.N;
    const int M = vgrid.M;

    Stats empty_value, empty_exercise, diagonal;
    for (int i = 0; i <= N; ++i) {
        for (int n = 0; n < model.nodes(i); ++n) {
            empty_value.add_abs(bundle.j_at(i, n, 0));
            if (i < N)
                empty_exercise.add_signed(
                    std::max(model.steps[i][n].payoff + bundle.d_at(i, n, 0), 0.0));
            if (N - i <= M) diagonal.add_abs(bundle.d_at(i, n, N - i));
        }
    }
    return {
        make_check("boundary_empty_level_value_zero", empty_value.max_abs, empty_value.mean(),
                   0.0, empty_value.cells),
        make_check("boundary_empty_level_no_exercise", std::max(empty_exercise.max_abs, 0.0),
                   empty_exercise.mean(), 1e-10, empty_exercise.cells),
        make_check("boundary_exhaustion_marginal_zero", diagonal.max_abs, diagonal.mean(), 0.0,
                   diagonal.cells),
    };
}

Control zero_control(const LatticeModel& model, const VolumeGrid& vgrid) {
    const int N = model.tgrid.N;
    const int W = vgrid.M + 1;
    Control c(N + 1);
    for (int i = 0; i <= N; ++i) c[i].assign(static_cast<size_t>(model.nodes(i)) * W, 0);
    return c;
}

Control dp_argmax_control(const LatticeModel& model, const VolumeGrid& vgrid, const Surface& J) {
    const int N = model.tgrid.N;
    const int W = vgrid.M + 1;
    const double gain_scale = vgrid.L * model.tgrid.dt;
    Control c = zero_control(model, vgrid);
    std::vector<double> cont(W);
    for (int i = 0; i < N; ++i) {
        for (int n = 0; n < model.nodes(i); ++n) {
            const LatticeNode& node = model.steps[i][n];
            expectations(node, J[i + 1], W, cont);
            const double gain = gain_scale * node.payoff;
            for (int j = 1; j < W; ++j)
                c[i][static_cast<size_t>(n) * W + j] = (gain + cont[j - 1] >= cont[j]) ? 1 : 0;
        }
    }
    return c;
}

Control random_control(const LatticeModel& model, const VolumeGrid& vgrid, uint64_t seed,
                       uint64_t index) {
    const int N = model.tgrid.N;
    const int W = vgrid.M + 1;
    Control c = zero_control(model, vgrid);
    uint64_t rank = 0;
    for (int i = 0; i < N; ++i) {
        for (int n = 0; n < model.nodes(i); ++n) {
            for (int j = 0; j < W; ++j, ++rank) {
                if (j == 0) continue;
                c[i][static_cast<size_t>(n) * W + j] = draw_unit(seed, index, rank) < 0.5 ? 1 : 0;
            }
        }
    }
    return c;
}

namespace {

// Shared backward sweep: reconstructs either the chain-rule value C (mode
// `reconstruct`) or the optimality gap G (mode !reconstruct) for a control.
// Both use the decision marginal Deff derived from J's own one-step
// expectations, which makes the identities exact on the lattice.
template <bool Reconstruct, typename Visit>
void control_sweep(const LatticeModel& model, const VolumeGrid& vgrid, const Surface& J,
                   const Control& control, Surface* keep, Visit&& visit) {
    const int N = model.tgrid.N;
    const int W = vgrid.M + 1;
    const double dy = vgrid.dy;
    const double gain_scale = vgrid.L * model.tgrid.dt;

    std::vector<double> v_next(static_cast<size_t>(model.nodes(N)) * W, 0.0);
    if (keep) {
        keep->assign(N + 1, {});
        (*keep)[N] = v_next;
    }
    for (int n = 0; n < model.nodes(N); ++n)
        for (int j = 0; j < W; ++j) visit(N, n, j, 0.0);

    std::vector<double> v_cur, cont_j(W), cont_v(W);
    for (int i = N - 1; i >= 0; --i) {
        v_cur.assign(static_cast<size_t>(model.nodes(i)) * W, 0.0);
        for (int n = 0; n < model.nodes(i); ++n) {
            const LatticeNode& node = model.steps[i][n];
            expectations(node, J[i + 1], W, cont_j);
            expectations(node, v_next, W, cont_v);
            const double gain = gain_scale * node.payoff;
            double* row = &v_cur[static_cast<size_t>(n) * W];
            const uint8_t* crow = &control[i][static_cast<size_t>(n) * W];
            // Level 0: no volume, control forced to stay, no gain terms.
            row[0] = cont_v[0];
            visit(i, n, 0, row[0]);
            for (int j = 1; j < W; ++j) {
                const double deff = (cont_j[j - 1] - cont_j[j]) / dy;
                const double s = node.payoff + deff;
                const double splus = std::max(s, 0.0);
                const int c = crow[j];
                double v;
                if (Reconstruct) {
                    v = c ? gain_scale * (splus - s) + gain + cont_v[j - 1]
                          : gain_scale * splus + cont_v[j];
                } else {
                    v = c ? gain_scale * (splus - s) + cont_v[j - 1]
                          : gain_scale * splus + cont_v[j];
                }
                row[j] = v;
                visit(i, n, j, v);
            }
        }
        if (keep) (*keep)[i] = v_cur;
        v_next.swap(v_cur);
    }
}

} // namespace

CheckResult chain_rule_check(const LatticeModel& model, const VolumeGrid& vgrid, const Surface& J,
                             const std::vector<Control>& controls, double tolerance) {
    const int W = vgrid.M + 1;
    Stats st;
    for (const Control& control : controls) {
        control_sweep<true>(model, vgrid, J, control, nullptr,
                            [&](int i, int n, int j, double v) {
                                st.add_abs(v - J[i][static_cast<size_t>(n) * W + j]);
                            });
    }
    return make_check("chain_rule", st.max_abs, st.mean(), tolerance, st.cells);
}

Surface optimality_gap_surface(const LatticeModel& model, const VolumeGrid& vgrid,
                               const Surface& J, const Control& control) {
    Surface G;
    control_sweep<false>(model, vgrid, J, control, &G, [](int, int, int, double) {});
    return G;
}

CheckResult optimality_residual(const LatticeModel& model, const VolumeGrid& vgrid,
                                const Surface& J, const Control& control, double tolerance,
                                const std::string& label) {
    Stats st;
    control_sweep<false>(model, vgrid, J, control, nullptr,
                         [&](int, int, int, double v) { st.add_abs(v); });
    return make_check("optimality_residual_" + label, st.max_abs, st.mean(), tolerance, st.cells);
}

std::vector<CheckResult> optimality_gap_checks(const LatticeModel& model, const VolumeGrid& vgrid,
                                               const Surface& J, int start_level, uint64_t seed,
                                               int n_random) {
    std::vector<CheckResult> out;

    out.push_back(
        optimality_residual(model, vgrid, J, dp_argmax_control(model, vgrid, J), 1e-10, "dp_policy"));

    // Never exercising forfeits the whole value: gap at the start cell equals
    // J(0, root, start_level).
    const Surface G = optimality_gap_surface(model, vgrid, J, zero_control(model, vgrid));
    const double diff = G[0][start_level] - J[0][start_level];
    out.push_back(make_check("optimality_gap_never_exercise_equals_value", std::abs(diff),
                             std::abs(diff), 1e-10, 1));

    Stats neg;
    for (int k = 0; k < n_random; ++k) {
        const Surface Gr =
            optimality_gap_surface(model, vgrid, J, random_control(model, vgrid, seed, k));
        for (int i = 0; i <= model.tgrid.N; ++i)
            for (size_t c = 0; c < Gr[i].size(); ++c) neg.add_signed(-Gr[i][c]);
    }
    out.push_back(make_check("optimality_gap_nonnegative_random_controls",
                             std::max(neg.max_abs, 0.0), neg.mean(), 1e-10, neg.cells));
    return out;
}

std::vector<CheckResult> structural_checks(const LatticeModel& model, const VolumeGrid& vgrid,
                                           const SurfaceBundle& bundle) {
    const int N = model.tgrid.N;
    const int M = vgrid.M;
    const int W = M + 1;
    const double dy = vgrid.dy;

    Stats terminal, nonneg, monotone, concave, lipschitz, d_sign, d_monotone, d_submart,
        j_supermart, uncon_match, forced_rate, d_recompute, w_recompute;

    const Surface D2 = marginal_left(bundle.J, model, vgrid);
    const NodeField W2 = unconstrained_values(model, vgrid);
    const Control dp = dp_argmax_control(model, vgrid, bundle.J);

    std::vector<double> cont_j(W), cont_d(W);
    for (int i = 0; i <= N; ++i) {
        for (int n = 0; n < model.nodes(i); ++n) {
            const double* jr = &bundle.J[i][static_cast<size_t>(n) * W];
            const double* dr = &bundle.D[i][static_cast<size_t>(n) * W];
            const double z = bundle.Z[i][n];
            for (int j = 0; j <= M; ++j) {
                if (i == N) terminal.add_abs(jr[j]);
                nonneg.add_signed(-jr[j]);
                d_sign.add_signed(dr[j]);
                if (j + 1 <= M) {
                    monotone.add_signed(jr[j] - jr[j + 1]);
                    lipschitz.add_signed((jr[j + 1] - jr[j]) - dy * z);
                    d_monotone.add_signed(dr[j] - dr[j + 1]);
                }
                if (j >= 1 && j + 1 <= M)
                    concave.add_signed((jr[j - 1] + jr[j + 1]) - 2.0 * jr[j]);
                if (j >= N - i) uncon_match.add_abs(jr[j] - bundle.W[i][n]);
                if (i < N && j >= 1 && j >= N - i)
                    forced_rate.add_abs(dp[i][static_cast<size_t>(n) * W + j] ? 0.0 : 1.0);
                d_recompute.add_abs(dr[j] - D2[i][static_cast<size_t>(n) * W + j]);
            }
            w_recompute.add_abs(bundle.W[i][n] - W2[i][n]);
            if (i < N) {
                const LatticeNode& node = model.steps[i][n];
                expectations(node, bundle.J[i + 1], W, cont_j);
                expectations(node, bundle.D[i + 1], W, cont_d);
                for (int j = 0; j <= M; ++j) {
                    j_supermart.add_signed(cont_j[j] - jr[j]);
                    d_submart.add_signed(dr[j] - cont_d[j]);
                }
            }
        }
    }

    return {
        make_check("terminal_value_zero", terminal.max_abs, terminal.mean(), 0.0, terminal.cells),
        make_check("value_nonnegative", std::max(nonneg.max_abs, 0.0), nonneg.mean(), 0.0,
                   nonneg.cells),
        make_check("value_monotone_in_level", std::max(monotone.max_abs, 0.0), monotone.mean(),
                   0.0, monotone.cells),
        make_check("value_concave_in_level", std::max(concave.max_abs, 0.0), concave.mean(),
                   1e-10, concave.cells),
        make_check("value_increment_within_payoff_bound", std::max(lipschitz.max_abs, 0.0),
                   lipschitz.mean(), 1e-10, lipschitz.cells),
        make_check("marginal_nonpositive", std::max(d_sign.max_abs, 0.0), d_sign.mean(), 0.0,
                   d_sign.cells),
        make_check("marginal_monotone_in_level", std::max(d_monotone.max_abs, 0.0),
                   d_monotone.mean(), 1e-9, d_monotone.cells),
        make_check("marginal_submartingale", std::max(d_submart.max_abs, 0.0), d_submart.mean(),
                   1e-9, d_submart.cells),
        make_check("value_supermartingale_in_time", std::max(j_supermart.max_abs, 0.0),
                   j_supermart.mean(), 0.0, j_supermart.cells),
        make_check("unconstrained_region_match", uncon_match.max_abs, uncon_match.mean(), 0.0,
                   uncon_match.cells),
        make_check("unconstrained_region_full_rate", forced_rate.max_abs, forced_rate.mean(), 0.0,
                   forced_rate.cells),
        make_check("marginal_recompute_match", d_recompute.max_abs, d_recompute.mean(), 0.0,
                   d_recompute.cells),
        make_check("unconstrained_recompute_match", w_recompute.max_abs, w_recompute.mean(), 0.0,
                   w_recompute.cells),
    };
}

OracleValue analytic_indicator_value(const ModelParams& params, double rate_cap, double t,
                                     double y, bool alive) {
    if (params.kind == ModelKind::IndicatorDeterministic) {
        const double v = std::min(1.0 - y, rate_cap * std::max(params.tstar - t, 0.0)) *
                         (alive ? 1.0 : 0.0);
        // Dead only happens at t >= tstar, where the formula is 0 anyway.
        return OracleValue{std::max(v, 0.0), "closed-form", "min(1-y, L*max(tstar-t,0))"};
    }
    if (params.kind == ModelKind::IndicatorExponential) {
        if (!alive) return OracleValue{0.0, "closed-form", "0 (absorbed)"};
        const double b = std::min(1.0 - y, rate_cap * (params.T - t));
        const double v = (rate_cap / params.lambda) *
                         (1.0 - std::exp(-params.lambda * std::max(b, 0.0) / rate_cap));
        return OracleValue{v, "closed-form", "(L/lambda)*(1-exp(-lambda*min((1-y)/L, T-t)))"};
    }
    throw std::invalid_argument("analytic_indicator_value: not an indicator model");
}

std::vector<double> brute_force_values(const LatticeModel& model, const VolumeGrid& vgrid,
                                       int max_cells) {
    const int N = model.tgrid.N;
    const int M = vgrid.M;
    const int W = M + 1;
    const double gain_scale = vgrid.L * model.tgrid.dt;

    long long k = 0;
    for (int i = 0; i < N; ++i) k += static_cast<long long>(model.nodes(i)) * M;
    if (k > max_cells)
        throw std::invalid_argument("brute_force_values: too many policy cells to enumerate");

    // Bit position of each decision cell (step, node, level >= 1) in a mask.
    std::vector<uint64_t> offsets(N);
    {
        uint64_t off = 0;
        for (int i = 0; i < N; ++i) {
            offsets[i] = off;
            off += static_cast<uint64_t>(model.nodes(i)) * M;
        }
    }

    std::vector<double> best(W, 0.0);
    std::vector<double> v_next, v_cur;
    for (uint64_t mask = 0; mask < (uint64_t(1) << k); ++mask) {
        v_next.assign(static_cast<size_t>(model.nodes(N)) * W, 0.0);
        for (int i = N - 1; i >= 0; --i) {
            v_cur.assign(static_cast<size_t>(model.nodes(i)) * W, 0.0);
            for (int n = 0; n < model.nodes(i); ++n) {
                const LatticeNode& node = model.steps[i][n];
                const double gain = gain_scale * node.payoff;
                for (int j = 0; j <= M; ++j) {
                    const uint64_t pos = offsets[i] + static_cast<uint64_t>(n) * M + (j - 1);
                    const int c = (j >= 1 && ((mask >> pos) & 1)) ? 1 : 0;
                    double e = 0.0;
                    for (const Arc& a : node.arcs)
                        e += a.p * v_next[static_cast<size_t>(a.to) * W + (j - c)];
                    v_cur[static_cast<size_t>(n) * W + j] = (c ? gain : 0.0) + e;
                }
            }
            v_next.swap(v_cur);
        }
        for (int j = 0; j <= M; ++j) best[j] = std::max(best[j], v_next[j]);
    }
    return best;
}

OracleValue brute_force_value(const LatticeModel& model, const VolumeGrid& vgrid, int max_cells) {
    const std::vector<double> best = brute_force_values(model, vgrid, max_cells);
    const int j0 = level_of(vgrid, 0.0);
    return OracleValue{best[j0], "brute-force", "max over enumerated feasible policies"};
}

CheckResult brute_force_check(const LatticeModel& model, const VolumeGrid& vgrid, const Surface& J,
                              double tolerance, int max_cells) {
    const std::vector<double> best = brute_force_values(model, vgrid, max_cells);
    Stats st;
    for (int j = 0; j <= vgrid.M; ++j) st.add_abs(best[j] - J[0][j]);
    return make_check("brute_force_match", st.max_abs, st.mean(), tolerance, st.cells);
}

} // namespace swing
