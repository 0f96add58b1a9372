#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace negham {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Dispersion {
    std::function<double(double)> energy;
    std::function<double(double)> velocity;

    static Dispersion hopping();
};

enum class StateKind { squeezed, symmetric };

struct OccupationFunction {
    std::function<double(double)> n;
    StateKind kind = StateKind::symmetric;

    double operator()(double k) const { return n(k); }
    static OccupationFunction dimer();
    static OccupationFunction constant(double value, StateKind kind);
};

// Lattice view: A1 = {0..l1-1}, A2 = {l1+d .. l1+d+l2-1}.
// Continuum view is centred on the gap: A1 = [-d/2-l1, -d/2], A2 = [d/2, d/2+l2].
struct TripartiteGeometry {
    int l1 = 1;
    int l2 = 1;
    int d = 1;

    TripartiteGeometry() = default;
    TripartiteGeometry(int l1_, int l2_, int d_);

    int size() const { return l1 + l2; }
    int a2_begin() const { return l1 + d; }
    bool equal_intervals() const { return l1 == l2; }
    std::vector<int> sites(int offset = 0) const;

    // Site i occupies the cell [i, i+1) shifted so the gap is centred on 0.
    double to_continuum(double site) const { return site + 0.5 - (l1 + 0.5 * d); }
    double to_lattice(double x) const { return x - 0.5 + (l1 + 0.5 * d); }
    bool in_a1(double x) const { return x >= -0.5 * d - l1 && x < -0.5 * d; }
    bool in_a2(double x) const { return x >= 0.5 * d && x < 0.5 * d + l2; }
    bool in_a(double x) const { return in_a1(x) || in_a2(x); }
};

double eta(double n);
double clip_occupation(double n, double eps = 1e-12);

// alpha == 1 is the replica limit of the even branch.
double s_tilde(int alpha, double n);
double dimer_occupation(double k);

// Uniform midpoint grid on [-pi, pi].
struct KGrid {
    std::vector<double> k;
    double weight = 0.0;  // dk / (2 pi)
    explicit KGrid(int points);
};

}  // namespace negham
