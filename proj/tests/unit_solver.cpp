// Backward induction, marginal surfaces, CSV exchange, and interpolation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "core/lattice.hpp"
#include "core/solver.hpp"
#include "core/verify.hpp"

using namespace swing;

namespace {

ModelParams gbm_toy_params() {
    ModelParams p;
    p.kind = ModelKind::GbmCall;
    p.S0 = 100.0;
    p.K = 100.0;
    p.sigma = 0.3;
    p.r = 0.0;
    p.T = 0.5;
    p.N = 2;
    return p;
}

ModelParams cutoff_params(double tstar, double T, int N) {
    ModelParams p;
    p.kind = ModelKind::IndicatorDeterministic;
    p.tstar = tstar;
    p.T = T;
    p.N = N;
    return p;
}

ModelParams constant_params(double value, double T, int N) {
    ModelParams p;
    p.kind = ModelKind::Constant;
    p.value = value;
    p.T = T;
    p.N = N;
    return p;
}

} // namespace

TEST_CASE("two-step tree value matches exhaustive policy enumeration") {
    const LatticeModel m = build_lattice(gbm_toy_params());
    const VolumeGrid vg(2.0, m.tgrid, 2);
    const Surface J = solve_dp(m, vg);

    // Frozen by enumerating all 2^6 cell policies on this tree.
    CHECK(J[0][0] == 0.0);
    CHECK(J[0][1] == doctest::Approx(3.742984534375).epsilon(1e-12));
    CHECK(J[0][2] == doctest::Approx(3.742984534375).epsilon(1e-12));

    const std::vector<double> brute = brute_force_values(m, vg);
    REQUIRE(brute.size() == 3);
    for (int j = 0; j <= 2; ++j) CHECK(std::abs(J[0][j] - brute[j]) <= 1e-12);

    const OracleValue full = brute_force_value(m, vg);
    CHECK(full.provenance == "brute-force");
    CHECK(std::abs(full.value - J[0][level_of(vg, 0.0)]) <= 1e-12);
}

TEST_CASE("cutoff model value equals min(1 - y, L * remaining alive time)") {
    const LatticeModel m = build_lattice(cutoff_params(0.5, 1.0, 200));
    const VolumeGrid vg(2.0, m.tgrid, 200);
    const SurfaceBundle b = solve_all(m, vg);

    double worst = 0.0;
    for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j) {
            const double closed =
                std::min(1.0 - vg.y(j), 2.0 * std::max(0.5 - m.tgrid.t(i), 0.0));
            worst = std::max(worst, std::abs(b.j_at(i, 0, j) - closed));
        }
    // The cutoff lands on a grid time, so the lattice is exact up to rounding.
    CHECK(worst <= 1e-12);
}

TEST_CASE("power-of-two grid makes the cutoff model exact in floating point") {
    // dt = 0.25 and dy = 0.25 are dyadic, so every sum below is exact.
    const LatticeModel m = build_lattice(cutoff_params(0.625, 1.0, 4));
    const VolumeGrid vg(1.0, m.tgrid); // M defaults to 5
    const SurfaceBundle b = solve_all(m, vg);

    // First dead step is ceil(0.625 / 0.25) = 3, so value = min(j, 3 - i) cells.
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 5; ++j)
            CHECK(b.j_at(i, 0, j) == 0.25 * std::min(j, std::max(3 - i, 0)));

    // Marginal: -1 while another cell still fits before the cutoff, else 0;
    // exactly 0 on and below the exhaustion diagonal j >= N - i.
    for (int j = 1; j <= 5; ++j) CHECK(b.d_at(0, 0, j) == (j <= 3 ? -1.0 : 0.0));
    CHECK(b.d_at(0, 0, 0) == b.d_at(0, 0, 1)); // level 0 copies the first slope
    CHECK(b.d_at(2, 0, 2) == 0.0);             // j = N - i pin
    CHECK(b.d_at(4, 0, 0) == 0.0);             // terminal row is all pinned
}

TEST_CASE("constant model solves to capped linear accrual") {
    const LatticeModel m = build_lattice(constant_params(1.0, 1.0, 4));
    const VolumeGrid vg(1.0, m.tgrid);
    const SurfaceBundle b = solve_all(m, vg);
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 5; ++j)
            CHECK(b.j_at(i, 0, j) == 0.25 * std::min(j, 4 - i));
    CHECK(b.W[0][0] == 1.0);
    CHECK(b.Z[0][0] == 1.0);
}

TEST_CASE("terminal row and empty level are hard zeros") {
    const LatticeModel m = build_lattice(gbm_toy_params());
    const VolumeGrid vg(2.0, m.tgrid, 2);
    const Surface J = solve_dp(m, vg);
    for (int n = 0; n < m.nodes(2); ++n)
        for (int j = 0; j <= 2; ++j) CHECK(J[2][static_cast<size_t>(n) * 3 + j] == 0.0);
    for (int i = 0; i <= 2; ++i)
        for (int n = 0; n < m.nodes(i); ++n) CHECK(J[i][static_cast<size_t>(n) * 3] == 0.0);
}

TEST_CASE("solver rejects a volume grid whose cell is not one full-rate step") {
    const LatticeModel m = build_lattice(gbm_toy_params());
    const TimeGrid other(0.5, 4);
    const VolumeGrid mismatched(2.0, other); // dy = 0.25, but model dt = 0.25 * 2
    CHECK_THROWS_AS(solve_dp(m, mismatched), std::invalid_argument);
}

TEST_CASE("unconstrained value and forward payoff bound") {
    const LatticeModel m = build_lattice(gbm_toy_params());
    const VolumeGrid vg(2.0, m.tgrid, 2);
    const SurfaceBundle b = solve_all(m, vg);

    // On j >= N - i the budget never binds, so J coincides with W bit for bit.
    CHECK(b.j_at(0, 0, 2) == b.W[0][0]);
    for (int n = 0; n < 2; ++n)
        for (int j = 1; j <= 2; ++j) CHECK(b.j_at(1, n, j) == b.W[1][n]);

    // Z dominates payoffs and is a supermartingale run backward.
    for (int i = 0; i <= 2; ++i)
        for (int n = 0; n < m.nodes(i); ++n) CHECK(b.Z[i][n] >= m.steps[i][n].payoff);
    CHECK(b.Z[2][2] == m.steps[2][2].payoff);
}

TEST_CASE("start level lookup accepts grid points and rejects everything else") {
    const LatticeModel m = build_lattice(cutoff_params(0.5, 1.0, 200));
    const VolumeGrid vg(2.0, m.tgrid, 200);
    CHECK(level_of(vg, 0.0) == 100);
    CHECK(level_of(vg, 1.0) == 0);
    CHECK(level_of(vg, vg.y(7)) == 7);
    CHECK_THROWS_AS(level_of(vg, 0.0037), std::invalid_argument);  // off the grid
    CHECK_THROWS_AS(level_of(vg, -1.5), std::invalid_argument);    // below y_M
    CHECK_THROWS_AS(level_of(vg, 1.02), std::invalid_argument);    // above 1
}

TEST_CASE("CSV export/import round-trips the surfaces bit for bit") {
    const LatticeModel m = build_lattice(gbm_toy_params());
    const VolumeGrid vg(2.0, m.tgrid, 2);
    const SurfaceBundle b = solve_all(m, vg);

    std::ostringstream out;
    export_csv(b, m, out);
    const std::string csv = out.str();
    CHECK(csv.rfind("i,t,node,state,j,y,J,D,W\n", 0) == 0);

    std::istringstream in(csv);
    const SurfaceBundle r = import_csv(m, vg, in);
    for (int i = 0; i <= 2; ++i) {
        REQUIRE(r.J[i].size() == b.J[i].size());
        for (size_t c = 0; c < b.J[i].size(); ++c) {
            CHECK(r.J[i][c] == b.J[i][c]);
            CHECK(r.D[i][c] == b.D[i][c]);
        }
        for (int n = 0; n < m.nodes(i); ++n) {
            CHECK(r.W[i][n] == b.W[i][n]);
            CHECK(r.Z[i][n] == b.Z[i][n]); // recomputed from the model
        }
    }
}

TEST_CASE("CSV import rejects malformed surfaces") {
    const LatticeModel m = build_lattice(gbm_toy_params());
    const VolumeGrid vg(2.0, m.tgrid, 2);
    const SurfaceBundle b = solve_all(m, vg);
    std::ostringstream out;
    export_csv(b, m, out);
    const std::string csv = out.str();

    SUBCASE("wrong header") {
        std::istringstream in("i,t,node,state,j,y,J,D\n" + csv.substr(csv.find('\n') + 1));
        CHECK_THROWS_WITH_AS(import_csv(m, vg, in), doctest::Contains("header"),
                             std::invalid_argument);
    }
    SUBCASE("missing row") {
        const size_t last = csv.rfind('\n', csv.size() - 2);
        std::istringstream in(csv.substr(0, last + 1));
        CHECK_THROWS_WITH_AS(import_csv(m, vg, in), doctest::Contains("cover"),
                             std::invalid_argument);
    }
    SUBCASE("duplicated row") {
        const size_t header_end = csv.find('\n') + 1;
        const size_t row_end = csv.find('\n', header_end) + 1;
        const std::string dup = csv.substr(0, row_end) + csv.substr(header_end);
        std::istringstream in(dup);
        CHECK_THROWS_WITH_AS(import_csv(m, vg, in), doctest::Contains("repeats"),
                             std::invalid_argument);
    }
    SUBCASE("cell outside the grid") {
        std::string bad = csv;
        bad += "0,0,0,alive,9,0,0,0,0\n";
        std::istringstream in(bad);
        CHECK_THROWS_WITH_AS(import_csv(m, vg, in), doctest::Contains("outside"),
                             std::invalid_argument);
    }
    SUBCASE("empty file") {
        std::istringstream in("");
        CHECK_THROWS_AS(import_csv(m, vg, in), std::invalid_argument);
    }
}

TEST_CASE("interpolated queries agree with the grid and blend between steps") {
    const LatticeModel m = build_lattice(constant_params(1.0, 1.0, 4));
    const VolumeGrid vg(1.0, m.tgrid);
    const SurfaceBundle b = solve_all(m, vg);

    // On-grid queries reproduce stored values: J(0, y=0) = min(4, 4) cells.
    CHECK(interp_value(b, m, 0.0, 0, 0.0) == doctest::Approx(1.0));
    CHECK(interp_value(b, m, 1.0, 0, 0.0) == 0.0);

    // Midpoint in volume between levels 0 and 1 at t = 0.
    CHECK(interp_value(b, m, 0.0, 0, vg.y(1) + 0.5 * vg.dy) ==
          doctest::Approx(0.5 * (b.j_at(0, 0, 0) + b.j_at(0, 0, 1))));

    // Midpoint in time between steps 0 and 1 at full budget (level 4 both).
    CHECK(interp_value(b, m, 0.125, 0, 0.0) ==
          doctest::Approx(0.5 * (b.j_at(0, 0, 4) + b.j_at(1, 0, 4))));

    CHECK_THROWS_AS(interp_value(b, m, -0.5, 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(interp_value(b, m, 2.0, 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(interp_value(b, m, 0.0, 3, 0.0), std::invalid_argument);
}

TEST_CASE("brute force refuses lattices beyond the enumeration budget") {
    const LatticeModel m = build_lattice(cutoff_params(0.5, 1.0, 10));
    const VolumeGrid vg(1.0, m.tgrid); // 10 steps x 11 levels > 24 cells
    CHECK_THROWS_AS(brute_force_values(m, vg), std::invalid_argument);
}
