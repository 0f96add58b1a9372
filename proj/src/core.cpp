#include "negham/core.hpp"

#include <cmath>
#include <string>

namespace negham {

Dispersion Dispersion::hopping()
{
    return {[](double k) { return -std::cos(k); }, [](double k) { return std::sin(k); }};
}

OccupationFunction OccupationFunction::dimer()
{
    return {dimer_occupation, StateKind::symmetric};
}

OccupationFunction OccupationFunction::constant(double value, StateKind kind)
{
    return {[value](double) { return value; }, kind};
}

TripartiteGeometry::TripartiteGeometry(int l1_, int l2_, int d_) : l1(l1_), l2(l2_), d(d_)
{
    if (l1 < 1 || l2 < 1 || d < 1)
        throw DomainError("geometry: l1, l2, d must be >= 1");
}

std::vector<int> TripartiteGeometry::sites(int offset) const
{
    std::vector<int> s;
    s.reserve(size());
    for (int i = 0; i < l1; ++i) s.push_back(offset + i);
    for (int i = 0; i < l2; ++i) s.push_back(offset + a2_begin() + i);
    return s;
}

double eta(double n)
{
    if (!(n > 0.0 && n < 1.0))
        throw DomainError("eta: filling must lie in (0,1), got " + std::to_string(n));
    return std::log((1.0 - n) / n);
}

double clip_occupation(double n, double eps)
{
    return std::min(std::max(n, eps), 1.0 - eps);
}

double s_tilde(int alpha, double n)
{
    if (alpha < 1) throw DomainError("s_tilde: alpha must be >= 1");
    if (alpha == 1) return 2.0 * std::log(std::sqrt(n) + std::sqrt(1.0 - n));
    if (alpha % 2) return std::log(std::pow(n, alpha) + std::pow(1.0 - n, alpha));
    const double h = 0.5 * alpha;
    return 2.0 * std::log(std::pow(n, h) + std::pow(1.0 - n, h));
}

double dimer_occupation(double k) { return 0.5 * (1.0 + std::cos(k)); }

KGrid::KGrid(int points)
{
    if (points < 2) throw DomainError("k-grid needs at least 2 points");
    const double dk = 2.0 * pi / points;
    k.resize(points);
    for (int i = 0; i < points; ++i) k[i] = -pi + (i + 0.5) * dk;
    weight = 1.0 / points;
}

}  // namespace negham
