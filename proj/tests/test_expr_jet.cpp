#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lsinf/chart.hpp"
#include "lsinf/rng.hpp"
#include "oracles.hpp"

using namespace lsinf;

static VarTable xy_table() {
    VarTable t;
    t.names = {"x1", "y1"};
    return t;
}

TEST_CASE("parser: grammar basics") {
    VarTable t = xy_table();
    Expr e = parse_expr("x1*x1", t);
    CHECK(e.root().kind == ExprNode::Mul);
    CHECK(e.value({3.0, 0.0}) == 9.0);

    // precedence: ^ > unary- > * / > + -
    CHECK(parse_expr("-x1^2", t).value({2.0, 0.0}) == -4.0);
    CHECK(parse_expr("2+3*4", t).value({0.0, 0.0}) == 14.0);
    CHECK(parse_expr("2*3^2", t).value({0.0, 0.0}) == 18.0);
    CHECK(parse_expr("8-4-2", t).value({0.0, 0.0}) == 2.0);  // left assoc
    CHECK(parse_expr("8/4/2", t).value({0.0, 0.0}) == 1.0);
    CHECK(parse_expr("x1^(-2)", t).value({2.0, 0.0}) == 0.25);
    CHECK(parse_expr("exp(-1/x1)*sin(1/x1)", t).value({0.5, 0.0}) ==
          doctest::Approx(std::exp(-2.0) * std::sin(2.0)).epsilon(1e-15));
}

TEST_CASE("parser: syntax errors carry byte offsets") {
    VarTable t = xy_table();
    CHECK_THROWS_AS(parse_expr("", t), parse_error);
    try {
        parse_expr("x1+", t);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.offset == 3);
    }
    try {
        parse_expr("x1*z9", t);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.offset == 3);
        CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expr("tan(x1)", t), parse_error);
    CHECK_THROWS_AS(parse_expr("x1^1.5", t), parse_error);
    CHECK_THROWS_AS(parse_expr("(x1", t), parse_error);
}

TEST_CASE("parser: print round-trips structurally") {
    VarTable t = xy_table();
    Rng rng(7);
    const char* samples[] = {
        "x1*x1",        "x1+y1*x1-3/(x1+1)", "exp(-1/x1)*sin(1/x1)", "-x1^3+y1^(-2)",
        "sqrt(x1)+1.5", "cos(x1*y1)-log(x1)", "x1/(y1+2)/(x1+3)",    "-(x1+y1)",
    };
    for (const char* s : samples) {
        Expr e = parse_expr(s, t);
        Expr again = parse_expr(e.print(), t);
        CHECK(again == e);
    }
    // randomized round-trip over generated trees
    std::function<Expr(int)> gen = [&](int depth) -> Expr {
        if (depth == 0 || rng.below(4) == 0) {
            if (rng.below(2))
                return Expr::var(static_cast<int>(rng.below(2)),
                                 t.names[static_cast<std::size_t>(rng.below(2))]);
            return Expr::number(std::round(rng.uniform(-4.0, 4.0) * 8) / 8.0);
        }
        switch (rng.below(6)) {
            case 0: return gen(depth - 1) + gen(depth - 1);
            case 1: return gen(depth - 1) - gen(depth - 1);
            case 2: return gen(depth - 1) * gen(depth - 1);
            case 3: return gen(depth - 1) / gen(depth - 1);
            case 4: return -gen(depth - 1);
            default: return Expr::pow(gen(depth - 1), static_cast<long>(rng.below(4)));
        }
    };
    for (int i = 0; i < 300; ++i) {
        Expr e = gen(4);
        CHECK(parse_expr(e.print(), t) == e);
    }
}

TEST_CASE("jets: polynomial and standard derivatives") {
    VarTable t = xy_table();
    Jet j = parse_expr("x1^2", t).jet({3.0, 0.0}, 2);
    CHECK(j.value() == 9.0);
    CHECK(j.deriv({1, 0}) == 6.0);
    CHECK(j.deriv({2, 0}) == 2.0);

    Jet lg = parse_expr("log(x1)", t).jet({1.0, 0.0}, 2);
    CHECK(lg.value() == 0.0);
    CHECK(lg.deriv({1, 0}) == 1.0);
    CHECK(lg.deriv({2, 0}) == -1.0);
}

TEST_CASE("jets: exp(-1/x) against central finite differences") {
    VarTable t;
    t.names = {"x1"};
    Expr e = parse_expr("exp(-1/x1)", t);
    Jet j = e.jet({0.5}, 3);
    auto f = [&](const std::vector<double>& x) { return e.value(x); };
    double h = 1e-4;
    double d1 = oracles::fd_partial(f, {0.5}, 0, h);
    double d2 = oracles::fd_partial2(f, {0.5}, 0, 0, h);
    CHECK(j.deriv({1}) == doctest::Approx(d1).epsilon(1e-6));
    CHECK(j.deriv({2}) == doctest::Approx(d2).epsilon(1e-4));
    // third derivative via the 5-point central stencil
    auto fv = [&](double x) { return e.value({x}); };
    double d3 = (fv(0.5 + 2 * h) - 2 * fv(0.5 + h) + 2 * fv(0.5 - h) - fv(0.5 - 2 * h)) /
                (2 * h * h * h);
    CHECK(j.deriv({3}) == doctest::Approx(d3).epsilon(1e-3));
    // exact first derivative: exp(-1/x)/x^2
    CHECK(j.deriv({1}) == doctest::Approx(std::exp(-2.0) * 4.0).epsilon(1e-14));
}

TEST_CASE("jets: random expression battery matches finite differences") {
    VarTable t = xy_table();
    Rng rng(99);
    std::function<Expr(int)> gen = [&](int depth) -> Expr {
        if (depth == 0 || rng.below(3) == 0) {
            if (rng.below(2))
                return Expr::var(static_cast<int>(rng.below(2)),
                                 t.names[static_cast<std::size_t>(rng.below(2))]);
            return Expr::number(rng.uniform(0.25, 2.0));
        }
        switch (rng.below(7)) {
            case 0: return gen(depth - 1) + gen(depth - 1);
            case 1: return gen(depth - 1) - gen(depth - 1);
            case 2: return gen(depth - 1) * gen(depth - 1);
            case 3: return Expr::fun(FunKind::Sin, gen(depth - 1));
            case 4: return Expr::fun(FunKind::Cos, gen(depth - 1));
            case 5: return Expr::fun(FunKind::Exp, Expr::number(0.3) * gen(depth - 1));
            default: return Expr::pow(gen(depth - 1), 2);
        }
    };
    int tested = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Expr e = gen(5);
        std::vector<double> p = {rng.uniform(0.3, 1.5), rng.uniform(-1.0, 1.0)};
        Jet j;
        double v;
        try {
            v = e.value(p);
            j = e.jet(p, 2);
        } catch (const eval_error&) {
            continue;  // domain hit; rejected by construction elsewhere
        }
        if (!std::isfinite(v) || std::abs(v) > 1e6) continue;
        auto f = [&](const std::vector<double>& x) { return e.value(x); };
        ++tested;
        for (int i = 0; i < 2; ++i) {
            double fd = oracles::fd_partial(f, p, i);
            double scale = std::max({1.0, std::abs(fd)});
            CHECK(std::abs(j.deriv1(i) - fd) / scale < 1e-5);
        }
        for (int i = 0; i < 2; ++i)
            for (int k = i; k < 2; ++k) {
                double fd = oracles::fd_partial2(f, p, i, k);
                std::vector<int> alpha = {0, 0};
                alpha[i] += 1;
                alpha[k] += 1;
                double scale = std::max({1.0, std::abs(fd)});
                CHECK(std::abs(j.deriv(alpha) - fd) / scale < 1e-4);
            }
    }
    CHECK(tested > 700);
}

TEST_CASE("jets: linearity and product rule") {
    VarTable t = xy_table();
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Expr e1 = parse_expr("sin(x1*y1)+x1^2", t);
        Expr e2 = parse_expr("exp(y1)-x1*y1", t);
        double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
        std::vector<double> p = {rng.uniform(0.2, 1.0), rng.uniform(-1.0, 1.0)};
        Expr combo = Expr::number(a) * e1 + Expr::number(b) * e2;
        Jet jc = combo.jet(p, 2);
        Jet j1 = e1.jet(p, 2), j2 = e2.jet(p, 2);
        for (std::size_t c = 0; c < jc.space().size(); ++c)
            CHECK(jc.coef(c) ==
                  doctest::Approx(a * j1.coef(c) + b * j2.coef(c)).epsilon(1e-12).scale(1.0));
        // product rule on the order-1 part
        Jet jp = (e1 * e2).jet(p, 1);
        for (int i = 0; i < 2; ++i)
            CHECK(jp.deriv1(i) == doctest::Approx(j1.value() * j2.deriv1(i) +
                                                  j2.value() * j1.deriv1(i))
                                      .epsilon(1e-12)
                                      .scale(1.0));
    }
}

TEST_CASE("jets: domain errors") {
    VarTable t = xy_table();
    CHECK_THROWS_AS(parse_expr("log(x1-1)", t).jet({0.5, 0.0}, 1), eval_error);
    CHECK_THROWS_AS(parse_expr("sqrt(-x1)", t).jet({0.5, 0.0}, 1), eval_error);
    CHECK_THROWS_AS(parse_expr("1/(x1-x1)", t).jet({0.5, 0.0}, 1), eval_error);
    CHECK_THROWS_AS(parse_expr("1/(x1-x1)", t).value({0.5, 0.0}), eval_error);
}

TEST_CASE("jets: mixed-partial symmetry storage") {
    VarTable t = xy_table();
    Jet j = parse_expr("sin(x1*y1)*exp(x1)", t).jet({0.7, 0.4}, 3);
    // one coefficient per multi-index: d_xy == d_yx by construction
    CHECK(j.deriv({1, 1}) == j.deriv({1, 1}));
    // partial() consistency: d_y (d_x f) coefficient matches deriv({1,1})
    Jet dx = j.partial(0);
    CHECK(dx.deriv({0, 1}) == doctest::Approx(j.deriv({1, 1})).epsilon(1e-14));
}
