#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "subvarlap/error.hpp"
#include "subvarlap/variable_lebesgue.hpp"

namespace subvarlap {
namespace {

const GridDomain kUnit1({0.0}, {1.0}, {64});

GridFunction random_field(const GridDomain& dom, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    GridFunction f(dom);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
    return f;
}

ExponentField step_exponent(const GridDomain& dom, double left, double right, double cut = 0.5) {
    return ExponentField(GridFunction::sample(dom, [=](const Point& x) { return x[0] < cut ? left : right; }));
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::InvalidState;
}

TEST(ExponentField, CachesExtremaAndRejectsBadValues) {
    const auto p = step_exponent(kUnit1, 1.5, 2.5);
    EXPECT_EQ(p.minus(), 1.5);
    EXPECT_EQ(p.plus(), 2.5);
    EXPECT_FALSE(p.is_constant());
    EXPECT_EQ(p.scaled(2.0).plus(), 5.0);
    EXPECT_THROW(ExponentField(GridFunction(kUnit1, 0.5)), Error);
    EXPECT_THROW(ExponentField(GridFunction(kUnit1, INFINITY)), Error);
    EXPECT_THROW(Weight(GridFunction(kUnit1, 0.0)), Error);
}

TEST(Modular, Examples) {
    const auto p = step_exponent(kUnit1, 1.0, 2.0);
    EXPECT_EQ(modular(GridFunction(kUnit1), p), 0.0);
    EXPECT_NEAR(modular(GridFunction(kUnit1, 1.0), p), 1.0, 1e-14);
    EXPECT_NEAR(modular(GridFunction(kUnit1, 2.0), p), 3.0, 1e-13);
    // Weighted modular integrates |f w|^p.
    const Weight w(GridFunction(kUnit1, 0.5));
    EXPECT_NEAR(modular(GridFunction(kUnit1, 2.0), p, w), 1.0, 1e-14);
    GridFunction bad(kUnit1, 1.0);
    bad[3] = NAN;
    EXPECT_EQ(code_of([&] { (void)modular(bad, p); }), ErrorCode::InvalidArgument);
}

TEST(LuxemburgNorm, Examples) {
    const auto p = step_exponent(kUnit1, 1.0, 2.0);
    EXPECT_EQ(luxemburg_norm(GridFunction(kUnit1), p), 0.0);
    EXPECT_NEAR(luxemburg_norm(GridFunction(kUnit1, 2.0), p), 2.0, 1e-10);
    std::mt19937_64 rng(1);
    const auto q = ExponentField(random_field(kUnit1, rng, 1.0, 4.0));
    EXPECT_NEAR(luxemburg_norm(GridFunction(kUnit1, 1.0), q), 1.0, 1e-10);
    GridFunction bad(kUnit1, 1.0);
    bad[0] = INFINITY;
    EXPECT_EQ(code_of([&] { (void)luxemburg_norm(bad, p); }), ErrorCode::InvalidArgument);
}

TEST(LuxemburgNorm, ConstantExponentMatchesClassicalNorm) {
    std::mt19937_64 rng(2);
    const GridDomain dom({0, 0}, {2, 1}, {24, 16});
    for (double pc : {1.0, 1.5, 2.0, 3.0}) {
        const auto p = ExponentField::constant(dom, pc);
        for (int trial = 0; trial < 10; ++trial) {
            const auto f = random_field(dom, rng, -3.0, 3.0);
            double s = 0.0;
            for (double v : f.values()) s += std::pow(std::abs(v), pc);
            const double classical = std::pow(s * dom.cell_measure(), 1.0 / pc);
            EXPECT_NEAR(luxemburg_norm(f, p), classical, 1e-8 * classical);
        }
    }
}

TEST(LuxemburgNorm, NormModularSandwichAndUnitSphere) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> scale(0.05, 20.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = ExponentField(random_field(kUnit1, rng, 1.0, 3.5));
        const Weight w(random_field(kUnit1, rng, 0.2, 2.0));
        const auto f = scale(rng) * random_field(kUnit1, rng, -1.0, 1.0);
        const double n = luxemburg_norm(f, p, w);
        const double rho = modular(f, p, w);
        const double lo = n <= 1 ? std::pow(n, p.plus()) : std::pow(n, p.minus());
        const double hi = n <= 1 ? std::pow(n, p.minus()) : std::pow(n, p.plus());
        EXPECT_LE(lo, rho * (1 + 1e-9));
        EXPECT_GE(hi, rho * (1 - 1e-9));
        const auto unit = (1.0 / n) * f;
        EXPECT_NEAR(luxemburg_norm(unit, p, w), 1.0, 1e-8);
        EXPECT_NEAR(modular(unit, p, w), 1.0, 1e-6);
    }
}

TEST(LuxemburgNorm, HomogeneityDilationHolderEmbedding) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = ExponentField(random_field(kUnit1, rng, 1.2, 3.0));
        const auto f = random_field(kUnit1, rng, -2.0, 2.0);
        const double n = luxemburg_norm(f, p);
        EXPECT_NEAR(luxemburg_norm(-3.5 * f, p), 3.5 * n, 1e-10 * n);

        const double s = 1.0 / p.minus() + u(rng) * (3.0 - 1.0 / p.minus());
        const auto fs = f.map([s](double v) { return std::pow(std::abs(v), s); });
        EXPECT_NEAR(luxemburg_norm(fs, p), std::pow(luxemburg_norm(f, p.scaled(s)), s),
                    1e-8 * luxemburg_norm(fs, p));

        // Both factors in 2r, so 1/r = 1/(2r) + 1/(2r).
        const auto g = random_field(kUnit1, rng, -2.0, 2.0);
        const auto r = ExponentField(p.field().map([](double v) { return std::max(1.0, v / 2.0); }));
        const auto pq = r.scaled(2.0);
        EXPECT_LE(luxemburg_norm(f * g, r), 4.0 * luxemburg_norm(f, pq) * luxemburg_norm(g, pq));

        const auto bigger = ExponentField(p.field().map([](double v) { return v + 0.7; }));
        EXPECT_LE(n, (1.0 + kUnit1.total_measure()) * luxemburg_norm(f, bigger));
    }
}

TEST(ConjugateExponent, Examples) {
    EXPECT_EQ(conjugate_exponent(ExponentField::constant(kUnit1, 2.0)).plus(), 2.0);
    EXPECT_NEAR(conjugate_exponent(ExponentField::constant(kUnit1, 4.0)).plus(), 4.0 / 3.0, 1e-15);
    EXPECT_EQ(code_of([] { (void)conjugate_exponent(step_exponent(kUnit1, 1.0, 2.0)); }),
              ErrorCode::ConjugateInfinite);
}

TEST(SobolevExponent, Examples) {
    EXPECT_NEAR(sobolev_exponent(ExponentField::constant(kUnit1, 2.0), 4, 1).plus(), 4.0, 1e-15);
    EXPECT_NEAR(sobolev_exponent(ExponentField::constant(kUnit1, 1.5), 2, 1).plus(), 6.0, 1e-14);
    EXPECT_EQ(code_of([] { (void)sobolev_exponent(ExponentField::constant(kUnit1, 2.0), 4, 2); }),
              ErrorCode::SobolevExponentUndefined);
    const auto p = step_exponent(kUnit1, 1.2, 1.8);
    const auto ps = sobolev_exponent(p, 2, 1);
    for (std::size_t i = 0; i < p.field().size(); ++i) EXPECT_GT(ps[i], p[i]);
}

TEST(LogHolder, ConstantSmoothAndStep) {
    const auto g = CarnotGroup::euclidean(1);
    EXPECT_EQ(log_holder_check(ExponentField::constant(kUnit1, 2.0), g).c0, 0.0);

    auto smooth_c0 = [&](int n) {
        const GridDomain dom({0.0}, {1.0}, {n});
        return log_holder_check(ExponentField(GridFunction::sample(
                                    dom, [](const Point& x) { return 2.0 + std::sin(x[0]) / 4.0; })),
                                g)
            .c0;
    };
    const double s1 = smooth_c0(128), s2 = smooth_c0(512);
    EXPECT_GT(s1, 0.0);
    EXPECT_LT(s2, 1.0);
    EXPECT_NEAR(s2, s1, 0.1 * s1);

    auto step_c0 = [&](int n) {
        const GridDomain dom({0.0}, {1.0}, {n});
        LogHolderOptions opts;
        opts.threshold = 5.0;
        return log_holder_check(step_exponent(dom, 1.5, 2.5), g, opts);
    };
    const auto a = step_c0(64), b = step_c0(1024);
    // The straddling pair sits at distance h, so C0 = log(1/h).
    EXPECT_NEAR(a.c0, std::log(64.0), 1e-9);
    EXPECT_NEAR(b.c0, std::log(1024.0), 1e-9);
    EXPECT_TRUE(a.bounded);
    EXPECT_FALSE(b.bounded);
}

TEST(JumpCondition, Examples) {
    const auto h = CarnotGroup::heisenberg1();
    const GridDomain dom({-1, -1, -1}, {1, 1, 1}, {12, 12, 12});
    const double delta = 0.4;
    EXPECT_TRUE(jump_condition_check(ExponentField::constant(dom, 3.5), h, delta).holds);
    const auto wide = jump_condition_check(step_exponent(dom, 1.2, 3.9, 0.0), h, delta);
    EXPECT_FALSE(wide.holds);
    EXPECT_FALSE(wide.failures.empty());
    EXPECT_TRUE(jump_condition_check(step_exponent(dom, 1.8, 2.2, 0.0), h, delta).holds);
    EXPECT_EQ(code_of([&] { (void)jump_condition_check(ExponentField::constant(dom, 2.0), h, 0.1); }),
              ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace subvarlap
