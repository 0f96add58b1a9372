#include "negham/qp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace negham::qp {

namespace {

void require_equal(const TripartiteGeometry& g)
{
    if (!g.equal_intervals())
        throw UnsupportedError("quasiparticle weights need l1 == l2");
}

void require_time(double t)
{
    if (!(t >= 0.0)) throw DomainError("time must be >= 0");
}

// Breakpoints of the counting weights, as values of |v| t.
std::array<double, 4> kinks(const TripartiteGeometry& g)
{
    const double l = g.l1, d = g.d;
    return {0.5 * l, 0.5 * d, 0.5 * (l + d), l + 0.5 * d};
}

// Three-point Gauss-Legendre on each cell of the uniform grid. The weights
// are only piecewise linear in |v| t, so cells are split where |v(k)| t
// crosses a breakpoint; a plain midpoint sum stalls at O(h^2) on those kinks.
template <class F>
auto cell_sum(F& f, int m, double t, const Setup& s)
{
    const auto cs = kinks(s.geometry);
    auto u = [&](double k) { return std::abs(s.dispersion.velocity(k)) * t; };
    auto gl = [&](double a, double b) {
        static const double x = std::sqrt(0.6);
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        return (5.0 / 9.0 * (f(c - h * x) + f(c + h * x)) + 8.0 / 9.0 * f(c)) * h;
    };
    const double dk = 2.0 * pi / m;
    decltype(f(0.0)) acc{};
    std::vector<double> cuts;
    for (int i = 0; i < m; ++i) {
        const double a = -pi + i * dk, b = a + dk;
        const double pts[3] = {a, 0.5 * (a + b), b};
        cuts.assign({a});
        for (int q = 0; q < 2; ++q) {
            const double ua = u(pts[q]), ub = u(pts[q + 1]);
            for (double c : cs) {
                if ((ua - c) * (ub - c) >= 0.0) continue;
                double lo = pts[q], hi = pts[q + 1];
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    ((u(lo) - c) * (u(mid) - c) <= 0.0 ? hi : lo) = mid;
                }
                cuts.push_back(0.5 * (lo + hi));
            }
        }
        cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t q = 0; q + 1 < cuts.size(); ++q) acc += gl(cuts[q], cuts[q + 1]);
    }
    return acc / (2.0 * pi);
}

// The half-grid rerun guards against integrands the grid cannot resolve
// (NaN included).
template <class F>
auto integrate(F&& f, int points, double t, const Setup& s, const char* what)
{
    auto full = cell_sum(f, points, t, s);
    auto half = cell_sum(f, points / 2, t, s);
    const double diff = std::abs(full - half);
    if (!std::isfinite(std::abs(full)) || diff > 1e-4 * (1.0 + std::abs(full))) {
        std::ostringstream os;
        os << what << ": quadrature not converged (grid " << points << ": " << full
           << ", grid " << points / 2 << ": " << half << ")";
        throw NumericalError(os.str());
    }
    return full;
}

double log_mix(int alpha, double n)
{
    return std::log(std::pow(n, alpha) + std::pow(1.0 - n, alpha));
}

double binary_entropy(double n)
{
    double s = 0.0;
    if (n > 0.0) s -= n * std::log(n);
    if (n < 1.0) s -= (1.0 - n) * std::log(1.0 - n);
    return s;
}

}  // namespace

double bracket(double vt, double l, double d)
{
    return std::max(vt, 0.5 * d) - 2.0 * std::max(vt, 0.5 * (l + d)) + std::max(vt, l + 0.5 * d);
}

double pure_weight(double k, double t, const TripartiteGeometry& g, const Dispersion& disp)
{
    require_equal(g);
    require_time(t);
    const double l = g.l1, d = g.d;
    const double vt = std::abs(disp.velocity(k)) * t;
    if (!(vt > 0.5 * d && vt < l + 0.5 * d)) return 0.0;
    const double hi = std::min(0.5 * d + l, -0.5 * d + 2.0 * vt);
    const double lo = std::max(0.5 * d, -l - 0.5 * d + 2.0 * vt);
    return std::max(0.0, hi - lo);
}

double pure_weight_bracket(double k, double t, const TripartiteGeometry& g, const Dispersion& disp)
{
    require_equal(g);
    require_time(t);
    return 2.0 * bracket(std::abs(disp.velocity(k)) * t, g.l1, g.d);
}

double mixed_weight(double k, double t, const TripartiteGeometry& g, const Dispersion& disp)
{
    require_equal(g);
    require_time(t);
    const double l = g.l1;
    const double vt = std::abs(disp.velocity(k)) * t;
    return 2.0 * (2.0 * vt + l - std::max(2.0 * vt, l)) - 2.0 * bracket(vt, l, g.d);
}

bool chi_mixed(double x, double k, double t, const TripartiteGeometry& g, const Dispersion& disp)
{
    return g.in_a(x) && !g.in_a(x - 2.0 * disp.velocity(k) * t);
}

bool chi_pure(double x, double k, double t, const TripartiteGeometry& g, const Dispersion& disp)
{
    const double partner = x - 2.0 * disp.velocity(k) * t;
    return (g.in_a1(x) && g.in_a2(partner)) || (g.in_a2(x) && g.in_a1(partner));
}

double renyi_entropy(int alpha, double t, const Setup& s)
{
    if (alpha < 1) throw DomainError("alpha must be >= 1");
    auto f = [&](double k) {
        const double w = mixed_weight(k, t, s.geometry, s.dispersion);
        if (w == 0.0) return 0.0;
        const double n = s.occupation(k);
        return alpha == 1 ? w * binary_entropy(n) : w * log_mix(alpha, n) / (1.0 - alpha);
    };
    return integrate(f, s.kgrid, t, s, "renyi_entropy");
}

double log_ratio(int alpha, double t, const Setup& s)
{
    require_equal(s.geometry);
    require_time(t);
    auto f = [&](double k) {
        const double b = bracket(std::abs(s.dispersion.velocity(k)) * t, s.geometry.l1, s.geometry.d);
        if (b == 0.0) return 0.0;
        return b * s_tilde(alpha, clip_occupation(s.occupation(k), s.clip));
    };
    return integrate(f, s.kgrid, t, s, "log_ratio");
}

double renyi_negativity(int alpha, double t, const Setup& s)
{
    const double r = log_ratio(alpha, t, s);
    if (alpha == 1) return r;
    return r + (1.0 - alpha) * renyi_entropy(alpha, t, s);
}

double log_negativity(double t, const Setup& s) { return renyi_negativity(1, t, s); }

cplx charged_pure_factor(int alpha, double lambda, double n)
{
    if (alpha < 1) throw DomainError("alpha must be >= 1");
    const cplx p = std::polar(1.0, lambda);
    if (alpha % 2) return p * std::pow(n, alpha) + std::conj(p) * std::pow(1.0 - n, alpha);
    return p * std::pow(n, alpha) + std::conj(p) * std::pow(1.0 - n, alpha) +
           2.0 * std::pow(n * (1.0 - n), 0.5 * alpha);
}

cplx charged_pure_factor_squared(int alpha, double lambda, double n)
{
    if (alpha % 2) return charged_pure_factor(alpha, lambda, n);
    const cplx p = std::polar(1.0, lambda);
    const cplx b = p * std::pow(n, 0.5 * alpha) + std::conj(p) * std::pow(1.0 - n, 0.5 * alpha);
    return b * b;
}

cplx log_charged_moment(int alpha, double lambda, double t, const Setup& s)
{
    if (s.occupation.kind != StateKind::symmetric)
        throw UnsupportedError("charged moments are defined for symmetric states only");
    require_equal(s.geometry);
    require_time(t);
    const cplx p = std::polar(1.0, lambda);
    auto f = [&](double k) -> cplx {
        const double n = s.occupation(k);
        const double wm = mixed_weight(k, t, s.geometry, s.dispersion);
        // Half the intersection weight, so that lambda = 0 reproduces E_alpha.
        const double b = bracket(std::abs(s.dispersion.velocity(k)) * t, s.geometry.l1, s.geometry.d);
        cplx acc = 0.0;
        if (wm != 0.0) {
            const double a = std::pow(n, alpha), c = std::pow(1.0 - n, alpha);
            acc += 0.5 * wm * (std::log(std::conj(p) * a + c) + std::log(p * a + c));
        }
        if (b != 0.0) {
            const double nc = clip_occupation(n, s.clip);
            // alpha = 1 is the trace-norm replica limit taken along the even branch.
            const cplx pf = alpha == 1 ? p * nc + std::conj(p) * (1.0 - nc) + 2.0 * std::sqrt(nc * (1.0 - nc))
                                       : charged_pure_factor(alpha, lambda, nc);
            acc += b * std::log(pf);
        }
        return acc;
    };
    return integrate(f, s.kgrid, t, s, "charged_moment");
}

namespace {

double eta_at(double k, const Setup& s) { return eta(clip_occupation(s.occupation(k), s.clip)); }

}  // namespace

cplx kernel_mixed(int site, int z, double t, const Setup& s)
{
    require_time(t);
    const auto& g = s.geometry;
    const double x = g.to_continuum(site);
    if (!g.in_a(x)) throw DomainError("kernel_mixed: site outside A1 u A2");
    KGrid grid(s.kgrid);
    cplx acc = 0.0;
    for (double k : grid.k)
        if (chi_mixed(x, k, t, g, s.dispersion)) acc += eta_at(k, s) * std::polar(1.0, k * z);
    return acc * grid.weight;
}

// Both pure kernels integrate over k in (0, pi) with measure dk / 4 pi.
cplx kernel_plus(int site, int z, double t, const Setup& s)
{
    require_time(t);
    const auto& g = s.geometry;
    const double x = g.to_continuum(site);
    if (!g.in_a2(x)) throw DomainError("kernel_plus: site outside A2");
    const int m = s.kgrid / 2;
    cplx acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const double k = (i + 0.5) * pi / m;
        if (g.in_a1(x - 2.0 * std::abs(s.dispersion.velocity(k)) * t))
            acc += eta_at(k, s) * std::polar(1.0, k * z);
    }
    return acc / (4.0 * m);
}

cplx kernel_minus(int site, int z, double t, const Setup& s)
{
    require_time(t);
    const auto& g = s.geometry;
    const double x = g.to_continuum(site);
    if (!g.in_a1(x)) throw DomainError("kernel_minus: site outside A1");
    const bool sym = s.occupation.kind == StateKind::symmetric;
    const double sign = (sym && (z % 2)) ? -1.0 : 1.0;
    const int m = s.kgrid / 2;
    cplx acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const double k = (i + 0.5) * pi / m;
        if (g.in_a2(x + 2.0 * std::abs(s.dispersion.velocity(k)) * t))
            acc += eta_at(k, s) * std::polar(1.0, sym ? k * z : -k * z);
    }
    return sign * acc / (4.0 * m);
}

}  // namespace negham::qp
