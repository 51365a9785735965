#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lsinf/geodesic.hpp"
#include "lsinf/inj_probes.hpp"
#include "oracles.hpp"

using namespace lsinf;

static Chart c2() { return Chart(2, 1); }
static MetricOnA id2() { return MetricOnA::identity(2); }

TEST_CASE("spray: closed-form values") {
    Chart c = c2();
    auto zero = builtin_algebroid(Builtin::Zero, c);
    MetricOnA g = id2();

    GeodesicState s1 = make_state(zero, g, ChartPoint{{1.0, 0.0}}, {1.0, 0.0});
    SprayOut o1 = spray(zero, g, s1);
    CHECK(o1.dp[0] == doctest::Approx(1.0));
    CHECK(o1.dp[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(o1.dv[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(o1.dv[1] == doctest::Approx(0.0).scale(1.0));

    GeodesicState s2 = make_state(zero, g, ChartPoint{{1.0, 0.0}}, {0.0, 1.0});
    SprayOut o2 = spray(zero, g, s2);
    CHECK(o2.dp[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(o2.dp[1] == doctest::Approx(1.0));
    CHECK(o2.dv[0] == doctest::Approx(-1.0).epsilon(1e-13));  // -Gamma^1_22 = -1
    CHECK(o2.dv[1] == doctest::Approx(0.0).scale(1.0));

    auto b = builtin_algebroid(Builtin::B, c);
    GeodesicState s3 = make_state(b, g, ChartPoint{{0.3, 0.7}}, {0.6, -0.4});
    SprayOut o3 = spray(b, g, s3);
    CHECK(o3.dv[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(o3.dv[1] == doctest::Approx(0.0).scale(1.0));

    CHECK_THROWS_AS(make_state(zero, g, ChartPoint{{1.0, 0.0}}, {0.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("integrate: hyperbolic vertical geodesic x(t) = x0 e^{-t}") {
    Chart c = c2();
    auto zero = builtin_algebroid(Builtin::Zero, c);
    MetricOnA g = id2();
    GeodesicState s0 = make_state(zero, g, ChartPoint{{1.0, 0.0}}, {-1.0, 0.0});
    Trajectory t = integrate(zero, g, s0, 5.0, 1e-3, 500);
    REQUIRE(t.status == FlowStatus::Ok);
    CHECK(t.points.back().t == doctest::Approx(5.0));
    CHECK(t.points.back().s.p.x[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-9));
    CHECK(t.points.back().s.p.x[1] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("integrate: flat factor geodesic on the b chart") {
    Chart c = c2();
    auto b = builtin_algebroid(Builtin::B, c);
    MetricOnA g = id2();
    GeodesicState s0 = make_state(b, g, ChartPoint{{0.5, 0.0}}, {0.0, 1.0});
    Trajectory t = integrate(b, g, s0, 3.0, 1e-3, 3000);
    REQUIRE(t.status == FlowStatus::Ok);
    CHECK(t.points.back().s.p.x[1] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(t.points.back().s.p.x[0] == doctest::Approx(0.5).epsilon(1e-12));

    // T = 0 gives the single starting state; constant trajectories are
    // depth-invariant
    Trajectory t0 = integrate(b, g, s0, 0.0, 1e-3);
    CHECK(t0.points.size() == 1);
    CHECK(boundary_depth_invariance(t0));
    CHECK_THROWS_AS(integrate(b, g, s0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("integrate: non-tangent frame aborts at the boundary with a diagnostic") {
    // constant coordinate frame: geodesics are straight chart lines, so a
    // run aimed at the face crosses x1 = 0 and must abort rather than leave
    // the chart
    Chart c = c2();
    auto flat = make_algebroid(
        c, {{Expr::number(1.0), Expr::number(0.0)}, {Expr::number(0.0), Expr::number(1.0)}});
    MetricOnA g = id2();
    GeodesicState s0 = make_state(flat, g, ChartPoint{{0.05, 0.0}}, {-1.0, 0.0});
    Trajectory t = integrate(flat, g, s0, 1.0, 1e-2);
    CHECK(t.status == FlowStatus::UnderflowAbort);
    CHECK(t.abort_step > 0);
    CHECK_FALSE(t.message.empty());
    CHECK_FALSE(boundary_depth_invariance(t));
}

TEST_CASE("integrate: time symmetry") {
    Chart c = c2();
    auto zero = builtin_algebroid(Builtin::Zero, c);
    MetricOnA g = id2();
    GeodesicState s0 = make_state(zero, g, ChartPoint{{0.8, -0.2}}, {0.6, 0.8});
    Trajectory fwd = integrate(zero, g, s0, 2.0, 1e-3, 2000);
    REQUIRE(fwd.status == FlowStatus::Ok);
    GeodesicState end = fwd.points.back().s;
    for (auto& v : end.v) v = -v;
    Trajectory back = integrate(zero, g, end, 2.0, 1e-3, 2000);
    REQUIRE(back.status == FlowStatus::Ok);
    const auto& fin = back.points.back().s;
    CHECK(std::abs(fin.p.x[0] - 0.8) < 1e-6);
    CHECK(std::abs(fin.p.x[1] + 0.2) < 1e-6);
    // induced-metric distance of the return error
    MatD gm = induced_metric(zero, g, s0.p);
    double dx = fin.p.x[0] - 0.8, dy = fin.p.x[1] + 0.2;
    double dist2 = gm(0, 0) * dx * dx + 2 * gm(0, 1) * dx * dy + gm(1, 1) * dy * dy;
    CHECK(std::sqrt(dist2) < 1e-6);
}

TEST_CASE("integrate: norm drift scale and RK4 order") {
    Chart c = c2();
    auto zero = builtin_algebroid(Builtin::Zero, c);
    MetricOnA g = id2();
    auto drift_sum = [&](double dt) {
        GeodesicState s0 = make_state(zero, g, ChartPoint{{1.0, 0.0}}, {0.6, 0.8});
        Trajectory t = integrate(zero, g, s0, 1.0, dt);
        double total = 0.0;
        for (auto& tp : t.points) total += std::abs(tp.drift);
        return total;
    };
    CHECK(drift_sum(1e-3) < 1e-6);  // per unit time
    double ratio = drift_sum(0.02) / drift_sum(0.01);
    CHECK(ratio > 8.0);
    CHECK(ratio < 40.0);
}

TEST_CASE("integrate: boundary depth invariance and completeness") {
    Rng rng(7);
    Chart cc2(2, 1), cc3(3, 1);
    for (Builtin which : {Builtin::B, Builtin::Zero, Builtin::Scattering, Builtin::Edge,
                          Builtin::DoubleEdge, Builtin::Rotating, Builtin::Adiabatic}) {
        Chart& c = (which == Builtin::B || which == Builtin::Zero || which == Builtin::Scattering)
                       ? cc2
                       : cc3;
        auto a = builtin_algebroid(which, c);
        MetricOnA g = MetricOnA::identity(a.rank);
        for (int run = 0; run < 6; ++run) {
            ChartPoint p = detail::random_interior_point(c, rng, 0.2, 0.9);
            std::vector<double> dir(a.rank);
            for (auto& d : dir) d = rng.uniform(-1.0, 1.0);
            double nz = 0.0;
            for (double d : dir) nz += d * d;
            if (nz == 0.0) dir[0] = 1.0;
            Trajectory t = integrate(a, g, make_state(a, g, p, dir), 3.0, 1e-2, 10);
            CHECK(boundary_depth_invariance(t));
        }
    }
    // 30 time units toward the boundary: length grows, coordinates stay positive
    auto zero = builtin_algebroid(Builtin::Zero, cc2);
    MetricOnA g = id2();
    auto rep = completeness_probe(zero, g, make_state(zero, g, ChartPoint{{0.8, 0.0}}, {-1.0, 0.0}),
                                  30.0);
    CHECK(rep.consistent_with_completeness);
    CHECK(rep.arc_length == doctest::Approx(30.0));
    CHECK(rep.min_corner > 0.0);
    CHECK(rep.min_corner == doctest::Approx(0.8 * std::exp(-30.0)).epsilon(1e-5));

    auto b = builtin_algebroid(Builtin::B, cc2);
    auto repb = completeness_probe(b, g, make_state(b, g, ChartPoint{{0.5, 0.0}}, {-1.0, 0.0}),
                                   30.0);
    CHECK(repb.consistent_with_completeness);
    CHECK(repb.min_corner == doctest::Approx(0.5 * std::exp(-30.0)).epsilon(1e-5));

    // tangential start: corner coordinate exactly conserved
    auto rept = completeness_probe(b, g, make_state(b, g, ChartPoint{{0.5, 0.0}}, {0.0, 1.0}),
                                   10.0);
    CHECK(rept.min_corner == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("spray tangency: corner velocity decays with the corner coordinate") {
    Rng rng(13);
    Chart cc2(2, 1), cc3(3, 1);
    for (Builtin which : {Builtin::B, Builtin::Zero, Builtin::Scattering, Builtin::Edge,
                          Builtin::Rotating}) {
        Chart& c = (which == Builtin::B || which == Builtin::Zero || which == Builtin::Scattering)
                       ? cc2
                       : cc3;
        auto a = builtin_algebroid(which, c);
        MetricOnA g = MetricOnA::identity(a.rank);
        double prev = 1e9;
        for (int m = 3; m <= 8; ++m) {
            ChartPoint p = detail::random_interior_point(c, rng, 0.3, 0.9);
            p.x[0] = std::ldexp(1.0, -m);
            std::vector<double> dir(a.rank, 1.0);
            SprayOut o = spray(a, g, make_state(a, g, p, dir));
            CHECK(std::abs(o.dp[0]) < prev + 1e-15);
            prev = std::abs(o.dp[0]);
        }
        CHECK(prev < 1e-2);
    }
}

TEST_CASE("interior oracle: frame geodesics satisfy the coordinate geodesic ODE") {
    // residual of pddot^c + Gamma^c_ab pdot^a pdot^b with coordinate
    // Christoffels from the induced metric
    Rng rng(17);
    Chart c = c2();
    for (Builtin which : {Builtin::Zero, Builtin::Scattering}) {
        auto a = builtin_algebroid(which, c);
        MetricOnA g = random_polynomial_metric(c, 2, rng);
        for (int trial = 0; trial < 5; ++trial) {
            ChartPoint p = detail::random_interior_point(c, rng, 0.3, 0.8);
            std::vector<double> dir = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            if (dir[0] == 0.0 && dir[1] == 0.0) dir[0] = 1.0;
            GeodesicState s = make_state(a, g, p, dir);
            SprayOut o = spray(a, g, s);
            // pddot^c = d/dt (rho^T v) = (d_a rho_ic) pdot^a v^i + rho_ic dv^i
            Mat<Jet> rho = anchor_jets(a, p, 1);
            std::vector<double> pddot(2, 0.0);
            for (int cc = 0; cc < 2; ++cc) {
                for (int i = 0; i < 2; ++i) {
                    for (int aa = 0; aa < 2; ++aa)
                        pddot[cc] += rho(i, cc).deriv1(aa) * o.dp[aa] * s.v[i];
                    pddot[cc] += rho(i, cc).value() * o.dv[i];
                }
            }
            auto christ = coordinate_christoffels(a, g, p);
            for (int cc = 0; cc < 2; ++cc) {
                double resid = pddot[cc];
                for (int aa = 0; aa < 2; ++aa)
                    for (int bb = 0; bb < 2; ++bb)
                        resid += christ.at({aa, bb, cc}) * o.dp[aa] * o.dp[bb];
                CHECK(std::abs(resid) < 1e-6);
            }
        }
    }
}

TEST_CASE("controlled check: b ratios x-independent, Euclidean ratio 1") {
    Chart c = c2();
    auto b = builtin_algebroid(Builtin::B, c);
    MetricOnA g = id2();
    std::vector<double> ratios;
    for (double x : {1e-2, 1e-4, 1e-6}) {
        Rng rng(5);
        auto rep = controlled_check(b, g, ChartPoint{{x, 0.0}}, 0.1, 6, 6, rng);
        ratios.push_back(rep.ratio);
        CHECK(rep.ratio > 1.0);
        CHECK(rep.ratio < std::exp(0.5));
    }
    for (double r : ratios) CHECK(std::abs(r - ratios[0]) / ratios[0] < 0.10);

    // closed chart with constant frame: constant metric, ratio 1
    Chart closed(2, 0);
    auto eu = make_algebroid(
        closed, {{Expr::number(1.0), Expr::number(0.0)}, {Expr::number(0.0), Expr::number(1.0)}});
    Rng rng(6);
    auto repe = controlled_check(eu, MetricOnA::identity(2), ChartPoint{{0.1, 0.2}}, 0.1, 6, 6, rng);
    CHECK(repe.ratio == doctest::Approx(1.0).epsilon(1e-9));

    // delta = 0 samples only the center
    Rng rng2(7);
    auto rep0 = controlled_check(b, g, ChartPoint{{0.5, 0.0}}, 0.0, 6, 6, rng2);
    CHECK(rep0.ratio == 1.0);
}

TEST_CASE("cvfe: extendable frames pass, rotating fails") {
    Chart cc2(2, 1), cc3(3, 1);
    auto b = builtin_algebroid(Builtin::B, cc2);
    MetricOnA g2 = id2();
    CHECK(cvfe_check(b, g2, 1, {1.0, 0.0}).pass);   // X_v = x dx
    CHECK(cvfe_check(b, g2, 1, {0.0, 1.0}).pass);   // X_v = dy
    auto zero = builtin_algebroid(Builtin::Zero, cc2);
    CHECK(cvfe_check(zero, g2, 1, {0.0, 1.0}).pass);  // X_v = x dy
    auto sc = builtin_algebroid(Builtin::Scattering, cc2);
    CHECK(cvfe_check(sc, g2, 1, {1.0, 0.0}).pass);

    auto rot = builtin_algebroid(Builtin::Rotating, cc3);
    auto rep = cvfe_check(rot, MetricOnA::identity(3), 1, {0.0, 1.0, 0.0});
    CHECK_FALSE(rep.pass);
    // the failing coefficients oscillate at order one
    double last = rep.diffs.empty() ? 0.0 : rep.diffs.back();
    CHECK(last > 0.1);

    CHECK_THROWS_AS(cvfe_check(b, g2, 1, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(cvfe_check(b, g2, 2, {1.0, 0.0}), std::out_of_range);
}

TEST_CASE("lce: b-structure candidates") {
    Chart c = c2();
    auto b = builtin_algebroid(Builtin::B, c);
    MetricOnA g = id2();
    // {dx/x, dy} is closed and spans the dual frame down to the boundary
    auto good = lce_check(b, g, {{c.parse("1/x1"), Expr::number(0.0)},
                                 {Expr::number(0.0), Expr::number(1.0)}});
    CHECK(good.closed);
    CHECK(good.spanning);
    CHECK(good.pass);
    // {dx, dy} pairs degenerately with x dx as x -> 0
    auto bad = lce_check(b, g, {{Expr::number(1.0), Expr::number(0.0)},
                                {Expr::number(0.0), Expr::number(1.0)}});
    CHECK(bad.closed);
    CHECK_FALSE(bad.spanning);
    CHECK_FALSE(bad.pass);
    // non-closed candidate: x dy has d(x dy) != 0
    auto nc = lce_check(b, g, {{c.parse("1/x1"), Expr::number(0.0)},
                               {Expr::number(0.0), c.parse("x1")}});
    CHECK_FALSE(nc.closed);
    CHECK_THROWS_AS(lce_check(b, g, {{c.parse("1/x1"), Expr::number(0.0)}}),
                    std::invalid_argument);
}

TEST_CASE("injectivity probe: hyperbolic and flat validate the full radius") {
    Chart c = c2();
    MetricOnA g = id2();
    auto zero = builtin_algebroid(Builtin::Zero, c);
    Rng rng(9);
    auto rep = injectivity_probe(zero, g, ChartPoint{{0.01, 0.0}}, 2.0, 8, rng, 1e-3, 4);
    CHECK(rep.validated_radius == doctest::Approx(2.0).epsilon(1e-6));

    auto b = builtin_algebroid(Builtin::B, c);
    Rng rng2(10);
    auto repb = injectivity_probe(b, g, ChartPoint{{1e-4, 0.0}}, 1.0, 8, rng2, 1e-3, 4);
    CHECK(repb.validated_radius == doctest::Approx(1.0).epsilon(1e-6));

    // single direction: chord test is vacuous, full radius validated
    Rng rng3(11);
    auto rep1 = injectivity_probe(b, g, ChartPoint{{0.5, 0.0}}, 1.0, 1, rng3, 1e-2, 4);
    CHECK(rep1.validated_radius == doctest::Approx(1.0).epsilon(1e-6));
}
