#pragma once

#include "negham/core.hpp"

namespace negham::qp {

struct Setup {
    OccupationFunction occupation = OccupationFunction::dimer();
    Dispersion dispersion = Dispersion::hopping();
    TripartiteGeometry geometry;
    int kgrid = 4096;
    double clip = 1e-12;
};

// max(vt,d/2) - 2 max(vt,(l+d)/2) + max(vt,l+d/2)
double bracket(double vt, double l, double d);

double pure_weight(double k, double t, const TripartiteGeometry& g, const Dispersion& disp);
double pure_weight_bracket(double k, double t, const TripartiteGeometry& g, const Dispersion& disp);
double mixed_weight(double k, double t, const TripartiteGeometry& g, const Dispersion& disp);

// Per-position indicators. x is a continuum coordinate, k the mode momentum.
bool chi_mixed(double x, double k, double t, const TripartiteGeometry& g, const Dispersion& disp);
bool chi_pure(double x, double k, double t, const TripartiteGeometry& g, const Dispersion& disp);

double renyi_entropy(int alpha, double t, const Setup& s);
double renyi_negativity(int alpha, double t, const Setup& s);
double log_ratio(int alpha, double t, const Setup& s);
double log_negativity(double t, const Setup& s);
cplx log_charged_moment(int alpha, double lambda, double t, const Setup& s);

// Pure-pair charge factor Tr[e^{i lambda Q} (rho^{T1})^alpha] of one symmetric pair.
cplx charged_pure_factor(int alpha, double lambda, double n);
// Even alpha as a squared bracket [e^{i l} n^{a/2} + e^{-i l} (1-n)^{a/2}]^2; differs from the
// brute-force trace away from lambda = 0.
cplx charged_pure_factor_squared(int alpha, double lambda, double n);

// Kernels take a lattice site index and a hopping distance z.
cplx kernel_mixed(int site, int z, double t, const Setup& s);
cplx kernel_plus(int site, int z, double t, const Setup& s);
cplx kernel_minus(int site, int z, double t, const Setup& s);

}  // namespace negham::qp
