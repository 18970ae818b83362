#include "solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace swing {

static void require_cell_match(const LatticeModel& model, const VolumeGrid& vgrid) {
    const double cell = vgrid.L * model.tgrid.dt;
    if (std::abs(vgrid.dy - cell) > 1e-12 * std::max(1.0, cell))
        throw std::invalid_argument("volume grid dy must equal L*dt for this lattice");
}

Surface solve_dp(const LatticeModel& model, const VolumeGrid& vgrid) {
    require_cell_match(model, vgrid);
    const int N = model.tgrid.N;
    const int M = vgrid.M;
    const int W = M + 1;
    const double gain_scale = vgrid.L * model.tgrid.dt;

    Surface J(N + 1);
    J[N].assign(static_cast<size_t>(model.nodes(N)) * W, 0.0);

    std::vector<double> cont(W);
    for (int i = N - 1; i >= 0; --i) {
        const auto& nodes = model.steps[i];
        J[i].assign(nodes.size() * W, 0.0);
        for (int n = 0; n < model.nodes(i); ++n) {
            const LatticeNode& node = nodes[n];
            for (int j = 0; j < W; ++j) {
                double c = 0.0;
                for (const Arc& a : node.arcs) c += a.p * J[i + 1][a.to * W + j];
                cont[j] = c;
            }
            double* row = &J[i][static_cast<size_t>(n) * W];
            row[0] = 0.0;
            const double gain = gain_scale * node.payoff;
            for (int j = 1; j < W; ++j) {
                const double go = gain + cont[j - 1];
                const double stay = cont[j];
                row[j] = go >= stay ? go : stay;
            }
        }
    }
    return J;
}

Surface marginal_left(const Surface& J, const LatticeModel& model, const VolumeGrid& vgrid) {
    const int N = model.tgrid.N;
    const int M = vgrid.M;
    const int W = M + 1;
    const double inv_dy = 1.0 / vgrid.dy;

    Surface D(N + 1);
    for (int i = 0; i <= N; ++i) {
        D[i].assign(J[i].size(), 0.0);
        for (int n = 0; n < model.nodes(i); ++n) {
            const double* j_row = &J[i][static_cast<size_t>(n) * W];
            double* d_row = &D[i][static_cast<size_t>(n) * W];
            d_row[0] = (j_row[0] - j_row[1]) * inv_dy;
            for (int j = 1; j < W; ++j) d_row[j] = (j_row[j - 1] - j_row[j]) * inv_dy;
            for (int j = std::max(N - i, 0); j < W; ++j) d_row[j] = 0.0;
        }
    }
    return D;
}

NodeField unconstrained_values(const LatticeModel& model, const VolumeGrid& vgrid) {
    require_cell_match(model, vgrid);
    const int N = model.tgrid.N;
    const double gain_scale = vgrid.L * model.tgrid.dt;

    NodeField W(N + 1);
    W[N].assign(model.nodes(N), 0.0);
    for (int i = N - 1; i >= 0; --i) {
        W[i].assign(model.nodes(i), 0.0);
        for (int n = 0; n < model.nodes(i); ++n) {
            const LatticeNode& node = model.steps[i][n];
            double c = 0.0;
            for (const Arc& a : node.arcs) c += a.p * W[i + 1][a.to];
            // Same operation shape as the DP's exercise branch so the
            // unconstrained-region identity J == W holds bit for bit.
            const double gain = gain_scale * node.payoff;
            W[i][n] = gain + c;
        }
    }
    return W;
}

NodeField forward_payoff_bound(const LatticeModel& model) {
    const int N = model.tgrid.N;
    NodeField Z(N + 1);
    Z[N].resize(model.nodes(N));
    for (int n = 0; n < model.nodes(N); ++n) Z[N][n] = model.steps[N][n].payoff;
    for (int i = N - 1; i >= 0; --i) {
        Z[i].resize(model.nodes(i));
        for (int n = 0; n < model.nodes(i); ++n) {
            const LatticeNode& node = model.steps[i][n];
            double c = 0.0;
            for (const Arc& a : node.arcs) c += a.p * std::max(node.payoff, Z[i + 1][a.to]);
            Z[i][n] = c;
        }
    }
    return Z;
}

SurfaceBundle solve_all(const LatticeModel& model, const VolumeGrid& vgrid) {
    SurfaceBundle b{model.tgrid, vgrid, model.id, {}, {}, {}, {}};
    b.J = solve_dp(model, vgrid);
    b.D = marginal_left(b.J, model, vgrid);
    b.W = unconstrained_values(model, vgrid);
    b.Z = forward_payoff_bound(model);
    return b;
}

int level_of(const VolumeGrid& vgrid, double y0) {
    const double q = (1.0 - y0) / vgrid.dy;
    const double rounded = std::round(q);
    if (std::abs(q - rounded) > 1e-9 * std::max(1.0, std::abs(q)))
        throw std::invalid_argument("y0 does not sit on a volume grid level");
    const int j = static_cast<int>(rounded);
    if (j < 0 || j > vgrid.M) throw std::invalid_argument("y0 outside the volume grid range");
    return j;
}

void export_csv(const SurfaceBundle& bundle, const LatticeModel& model, std::ostream& out) {
    const int N = model.tgrid.N;
    const int M = bundle.vgrid.M;
    out << "i,t,node,state,j,y,J,D,W\n";
    char buf[256];
    for (int i = 0; i <= N; ++i) {
        for (int n = 0; n < model.nodes(i); ++n) {
            const std::string state = model.state_label(i, n);
            for (int j = 0; j <= M; ++j) {
                std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%s,%d,%.17g,%.17g,%.17g,%.17g\n",
                              i, model.tgrid.t(i), n, state.c_str(), j, bundle.vgrid.y(j),
                              bundle.j_at(i, n, j), bundle.d_at(i, n, j), bundle.W[i][n]);
                out << buf;
            }
        }
    }
}

SurfaceBundle import_csv(const LatticeModel& model, const VolumeGrid& vgrid, std::istream& in) {
    const int N = model.tgrid.N;
    const int M = vgrid.M;
    const int W = M + 1;

    SurfaceBundle b{model.tgrid, vgrid, model.id, {}, {}, {}, {}};
    b.J.resize(N + 1);
    b.D.resize(N + 1);
    b.W.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        b.J[i].assign(static_cast<size_t>(model.nodes(i)) * W, 0.0);
        b.D[i].assign(static_cast<size_t>(model.nodes(i)) * W, 0.0);
        b.W[i].assign(model.nodes(i), 0.0);
    }
    b.Z = forward_payoff_bound(model);

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("surface CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "i,t,node,state,j,y,J,D,W")
        throw std::invalid_argument("surface CSV header does not match i,t,node,state,j,y,J,D,W");

    size_t expected = 0;
    for (int i = 0; i <= N; ++i) expected += static_cast<size_t>(model.nodes(i)) * W;

    size_t rows = 0;
    std::vector<char> seen;
    seen.assign(expected, 0);
    size_t offset_step = 0;
    std::vector<size_t> step_offset(N + 1);
    for (int i = 0; i <= N; ++i) {
        step_offset[i] = offset_step;
        offset_step += static_cast<size_t>(model.nodes(i)) * W;
    }

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        // i,t,node,state,j,y,J,D,W -- state may be non-numeric, so split on commas.
        std::array<std::string, 9> field;
        size_t start = 0;
        for (int f = 0; f < 9; ++f) {
            size_t end = f < 8 ? line.find(',', start) : line.size();
            if (end == std::string::npos) throw std::invalid_argument("surface CSV row with missing columns");
            field[f] = line.substr(start, end - start);
            start = end + 1;
        }
        const int i = std::stoi(field[0]);
        const int n = std::stoi(field[2]);
        const int j = std::stoi(field[4]);
        if (i < 0 || i > N || n < 0 || n >= model.nodes(i) || j < 0 || j > M)
            throw std::invalid_argument("surface CSV cell outside the model grid");
        b.J[i][static_cast<size_t>(n) * W + j] = std::stod(field[6]);
        b.D[i][static_cast<size_t>(n) * W + j] = std::stod(field[7]);
        b.W[i][n] = std::stod(field[8]);
        char& flag = seen[step_offset[i] + static_cast<size_t>(n) * W + j];
        if (flag) throw std::invalid_argument("surface CSV repeats a cell");
        flag = 1;
        ++rows;
    }
    if (rows != expected) throw std::invalid_argument("surface CSV does not cover every grid cell");
    return b;
}

static double value_at_level(const SurfaceBundle& b, int i, int n, double y) {
    const int M = b.vgrid.M;
    const double q = (1.0 - y) / b.vgrid.dy;
    if (q >= M) return b.W[i][n]; // below the stored grid the value is volume-independent
    const int lo = std::max(0, static_cast<int>(std::floor(q)));
    const int hi = std::min(M, lo + 1);
    const double w = q - lo;
    return (1.0 - w) * b.j_at(i, n, lo) + w * b.j_at(i, n, hi);
}

double interp_value(const SurfaceBundle& bundle, const LatticeModel& model, double t, int node, double y) {
    if (!(t >= 0.0 && t <= bundle.tgrid.T + 1e-12)) throw std::invalid_argument("interp_value: t outside [0, T]");
    if (!(y <= 1.0)) throw std::invalid_argument("interp_value: y must not exceed 1");
    const int N = bundle.tgrid.N;
    const double q = std::min(t / bundle.tgrid.dt, static_cast<double>(N));
    const int i = std::min(static_cast<int>(std::floor(q)), N);
    if (node < 0 || node >= model.nodes(i)) throw std::invalid_argument("interp_value: node outside step");
    const double here = value_at_level(bundle, i, node, y);
    const double w = q - i;
    if (w <= 0.0 || i == N) return here;
    double next = 0.0;
    for (const Arc& a : model.steps[i][node].arcs) next += a.p * value_at_level(bundle, i + 1, a.to, y);
    return (1.0 - w) * here + w * next;
}

} // namespace swing
