#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "negham/qp.hpp"

using namespace negham;
using namespace negham::qp;

namespace {

Dispersion flat_band(double v)
{
    return {[v](double k) { return v * k; }, [v](double) { return v; }};
}

// Dispersion whose |v| equals a prescribed vt at t = 1 for every k.
Dispersion constant_speed(double vt) { return flat_band(vt); }

Setup small(int l, int d, OccupationFunction occ = OccupationFunction::dimer())
{
    Setup s;
    s.geometry = TripartiteGeometry(l, l, d);
    s.occupation = occ;
    return s;
}

}  // namespace

TEST_CASE("pure weight examples")
{
    const TripartiteGeometry g(10, 10, 4);
    const auto disp = Dispersion::hopping();
    CHECK(pure_weight(0.7, 0.0, g, disp) == 0.0);
    // |v|t = d/2 + l/2
    CHECK(pure_weight(0.0, 1.0, g, constant_speed(7.0)) == doctest::Approx(10.0));
    CHECK(pure_weight(0.0, 1.0, g, constant_speed(12.0)) == 0.0);
    CHECK(pure_weight(0.0, 1.0, g, constant_speed(30.0)) == 0.0);
    CHECK_THROWS_AS(pure_weight(0.1, 1.0, TripartiteGeometry(3, 4, 1), disp), UnsupportedError);
    CHECK_THROWS_AS(pure_weight(0.1, -1.0, g, disp), DomainError);
}

TEST_CASE("bracket identity over random geometries")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> ul(1, 500), ud(1, 500);
    std::uniform_real_distribution<double> uv(0.0, 1200.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const int l = ul(rng), d = ud(rng);
        const TripartiteGeometry g(l, l, d);
        const auto disp = constant_speed(uv(rng));
        worst = std::max(worst, std::abs(pure_weight(0.0, 1.0, g, disp) - pure_weight_bracket(0.0, 1.0, g, disp)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("mixed weight examples")
{
    const TripartiteGeometry g(10, 10, 4);
    CHECK(mixed_weight(0.3, 0.0, g, Dispersion::hopping()) == 0.0);
    CHECK(mixed_weight(0.0, 1.0, g, constant_speed(1.0)) == doctest::Approx(4.0));
    // saturation is exact once 2|v|t exceeds l + d/2
    CHECK(mixed_weight(0.0, 1.0, g, constant_speed(50.0)) == 20.0);
    CHECK(mixed_weight(0.0, 1.0, g, constant_speed(1e6)) == 20.0);
}

// Pairs emitted at every cell centre x0 of a long chain: the k-mover sits at
// x0 + vt, its partner at x0 - vt. Integer vt keeps both on cell centres.
TEST_CASE("trajectory counting on a discrete chain")
{
    for (int l : {5, 10, 17}) {
        for (int d : {1, 4, 9}) {
            const TripartiteGeometry g(l, l, d);
            for (int vt = 0; vt <= 2 * l + d; ++vt) {
                double mixed = 0, pure = 0, inside = 0;
                for (int s = -4 * (l + d) - 2 * vt; s < 6 * (l + d) + 2 * vt; ++s) {
                    const double x = g.to_continuum(s);
                    const double partner = x - 2.0 * vt;
                    if (!g.in_a(x)) continue;
                    inside += 1;
                    if (!g.in_a(partner)) mixed += 1;
                    else if (g.in_a2(x) && g.in_a1(partner)) pure += 1;
                }
                const auto disp = constant_speed(vt);
                CHECK(std::abs(mixed - mixed_weight(0.0, 1.0, g, disp)) <= 1.0);
                CHECK(std::abs(pure - pure_weight(0.0, 1.0, g, disp)) <= 1.0);
                CHECK(inside == 2 * l);
                CHECK(mixed_weight(0.0, 1.0, g, disp) + pure_weight(0.0, 1.0, g, disp) <= 2.0 * l + 1e-12);
            }
        }
    }
}

TEST_CASE("Monte-Carlo pair counting at l=10, d=4, vt=1")
{
    const TripartiteGeometry g(10, 10, 4);
    std::mt19937_64 rng(3);
    const double lo = -40, hi = 40;
    std::uniform_real_distribution<double> u(lo, hi);
    const int samples = 400000;
    int mixed = 0;
    for (int i = 0; i < samples; ++i) {
        const double x0 = u(rng);
        const double x = x0 + 1.0, partner = x0 - 1.0;
        if (g.in_a(x) && !g.in_a(partner)) ++mixed;
    }
    const double est = (hi - lo) * mixed / samples;
    // binomial standard error ~ 0.025
    CHECK(est == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("indicators integrate to the weights")
{
    const TripartiteGeometry g(10, 10, 4);
    const int per_unit = 1024;
    for (double vt : {0.0, 0.75, 1.5, 2.25, 5.0, 7.0, 9.5, 11.25, 13.0, 40.0}) {
        const auto disp = constant_speed(vt);
        double m = 0, p = 0;
        for (int i = -60 * per_unit; i < 60 * per_unit; ++i) {
            const double x = (i + 0.5) / per_unit;
            m += chi_mixed(x, 0.0, 1.0, g, disp);
            p += chi_pure(x, 0.0, 1.0, g, disp);
        }
        CHECK(std::abs(m / per_unit - mixed_weight(0.0, 1.0, g, disp)) < 1e-10);
        CHECK(std::abs(p / per_unit - pure_weight(0.0, 1.0, g, disp)) < 1e-10);
    }
}

TEST_CASE("entropy and negativity at t=0 vanish")
{
    const auto s = small(40, 20);
    for (int a = 1; a <= 4; ++a) {
        CHECK(renyi_entropy(a, 0.0, s) == 0.0);
        CHECK(renyi_negativity(a, 0.0, s) == 0.0);
        CHECK(log_ratio(a, 0.0, s) == 0.0);
    }
}

TEST_CASE("half filling saturates at 2 l log 2")
{
    auto s = small(30, 10, OccupationFunction::constant(0.5, StateKind::symmetric));
    // modes slower than l/t miss the plateau; that deficit is ~l^2/t
    const double t = 1e15;
    CHECK(renyi_entropy(1, t, s) == doctest::Approx(60.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("d -> infinity gives twice the single-interval entropy")
{
    auto s = small(50, 1000000);
    s.kgrid = 4096;
    const auto disp = s.dispersion;
    // Reference: adaptive Gauss-Kronrod on (0, pi), split where 2 sin(k) t = l.
    auto single = [&](double t) {
        auto f = [&](double k) {
            const double n = dimer_occupation(k);
            double h = 0.0;
            if (n > 0) h -= n * std::log(n);
            if (n < 1) h -= (1 - n) * std::log(1 - n);
            return std::min(2.0 * std::abs(disp.velocity(k)) * t, 50.0) * h;
        };
        std::vector<double> cuts{0.0};
        if (50.0 < 2.0 * t) cuts.insert(cuts.end(), {std::asin(25.0 / t), pi - std::asin(25.0 / t)});
        cuts.push_back(pi);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            acc += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-14);
        return acc / pi;
    };
    for (double t : {3.0, 17.0, 40.0, 90.0}) CHECK(std::abs(renyi_entropy(1, t, s) - 2.0 * single(t)) < 1e-8);
}

TEST_CASE("E_2 = -S_2 and log R_2 = 0")
{
    const auto s = small(40, 20);
    for (double t : {5.0, 15.0, 25.0, 35.0, 60.0}) {
        CHECK(std::abs(log_ratio(2, t, s)) < 1e-14);
        CHECK(renyi_negativity(2, t, s) == doctest::Approx(-renyi_entropy(2, t, s)).epsilon(1e-13));
    }
}

TEST_CASE("log ratio vanishes before the light cone and at long times")
{
    const auto s = small(40, 20);
    for (int a = 1; a <= 4; ++a) {
        CHECK(log_ratio(a, 9.9, s) == 0.0);
        CHECK(std::abs(log_ratio(a, 1e12, s)) < 1e-12);
        CHECK(renyi_negativity(a, 1e12, s) ==
              doctest::Approx((1.0 - a) * renyi_entropy(a, 1e12, s)).epsilon(1e-10));
    }
    CHECK(log_negativity(30.0, s) == renyi_negativity(1, 30.0, s));
}

TEST_CASE("flat band: E_alpha is piecewise linear between the breakpoints")
{
    Setup s = small(10, 4, OccupationFunction::constant(0.3, StateKind::symmetric));
    s.dispersion = flat_band(1.0);
    // kinks at d/2, l/2, (l+d)/2, l+d/2
    const double cuts[] = {0.0, 2.0, 5.0, 7.0, 12.0, 20.0};
    for (int a : {1, 3, 4}) {
        for (int i = 0; i + 1 < 6; ++i) {
            const double lo = cuts[i], hi = cuts[i + 1];
            const double f0 = renyi_negativity(a, lo, s), f1 = renyi_negativity(a, hi, s);
            for (double frac : {0.25, 0.5, 0.8}) {
                const double t = lo + frac * (hi - lo);
                CHECK(renyi_negativity(a, t, s) == doctest::Approx(f0 + frac * (f1 - f0)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("E_alpha is continuous in t")
{
    // Lipschitz: halving the step halves the largest increment.
    const auto s = small(40, 20);
    auto max_jump = [&](int a, double dt) {
        double prev = renyi_negativity(a, 0.0, s), m = 0.0;
        for (double t = dt; t <= 100.0; t += dt) {
            const double cur = renyi_negativity(a, t, s);
            m = std::max(m, std::abs(cur - prev));
            prev = cur;
        }
        return m;
    };
    for (int a : {1, 3}) {
        const double coarse = max_jump(a, 0.5), fine = max_jump(a, 0.25);
        CHECK(coarse > 0.0);
        CHECK(fine < 0.55 * coarse);
    }
}

TEST_CASE("grid doubling changes the observables by less than 1e-8")
{
    auto s = small(200, 200);
    auto s2 = s;
    s2.kgrid = 2 * s.kgrid;
    for (double t : {50.0, 150.0, 250.0, 400.0}) {
        for (int a : {1, 2, 3, 4}) {
            CHECK(std::abs(renyi_entropy(a, t, s) - renyi_entropy(a, t, s2)) < 1e-8);
            CHECK(std::abs(log_ratio(a, t, s) - log_ratio(a, t, s2)) < 1e-8);
        }
    }
}

TEST_CASE("charged moments")
{
    const auto s = small(40, 20);
    for (int a : {1, 2, 3, 4}) {
        for (double t : {0.0, 12.0, 25.0, 50.0}) {
            const cplx z0 = log_charged_moment(a, 0.0, t, s);
            CHECK(std::abs(z0.imag()) < 1e-12);
            CHECK(z0.real() == doctest::Approx(renyi_negativity(a, t, s)).epsilon(1e-11));
            for (double lam : {0.3, 1.1, 2.7}) {
                const cplx zp = std::exp(log_charged_moment(a, lam, t, s));
                const cplx zm = std::exp(log_charged_moment(a, -lam, t, s));
                const cplx zw = std::exp(log_charged_moment(a, lam + 2 * pi, t, s));
                CHECK(std::abs(zm - std::conj(zp)) <= 1e-12 * (1 + std::abs(zp)));
                CHECK(std::abs(zw - zp) <= 1e-10 * (1 + std::abs(zp)));
            }
        }
    }
    CHECK_THROWS_AS(log_charged_moment(2, 0.1, 5.0, small(10, 4, OccupationFunction::constant(0.3, StateKind::squeezed))),
                    UnsupportedError);
}

TEST_CASE("pure charge factor at lambda = 0 is the negativity pair factor")
{
    for (double n : {0.1, 0.3, 0.5, 0.8}) {
        for (int a = 2; a <= 6; ++a) {
            const double want = std::exp(s_tilde(a, n));
            CHECK(std::abs(charged_pure_factor(a, 0.0, n) - want) < 1e-14);
            CHECK(std::abs(charged_pure_factor_squared(a, 0.0, n) - want) < 1e-14);
        }
    }
}

TEST_CASE("kernels: light cone and saturation")
{
    auto s = small(10, 4);
    const auto& g = s.geometry;
    for (int site = 0; site < 10; ++site)
        for (int z : {0, 1, 3}) {
            CHECK(kernel_mixed(site, z, 0.0, s) == cplx(0.0));
            CHECK(kernel_minus(site, z, 1.9, s) == cplx(0.0));
            CHECK(kernel_plus(g.a2_begin() + site, z, 1.9, s) == cplx(0.0));
            CHECK(std::abs(kernel_minus(site, z, 1e6, s)) == 0.0);
            CHECK(std::abs(kernel_plus(g.a2_begin() + site, z, 1e6, s)) == 0.0);
        }
    CHECK_THROWS_AS(kernel_mixed(g.l1 + 2, 0, 1.0, s), DomainError);
    CHECK_THROWS_AS(kernel_plus(0, 0, 1.0, s), DomainError);
    CHECK_THROWS_AS(kernel_minus(g.a2_begin(), 0, 1.0, s), DomainError);
}

TEST_CASE("kernel_mixed at long times is the GGE integral")
{
    auto s = small(10, 4, OccupationFunction::constant(0.3, StateKind::squeezed));
    for (int site : {0, 5, 9, 14, 20}) CHECK(kernel_mixed(site, 0, 1e6, s).real() == doctest::Approx(std::log(7.0 / 3.0)));
    auto sd = small(10, 4);
    KGrid grid(sd.kgrid);
    double gge = 0.0;
    for (double k : grid.k) gge += eta(clip_occupation(dimer_occupation(k)));
    gge *= grid.weight;
    CHECK(std::abs(kernel_mixed(3, 0, 1e6, sd) - gge) < 1e-12);
}
