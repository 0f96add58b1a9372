#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "negham/core.hpp"

namespace negham::gauss {

using Matrix = Eigen::MatrixXcd;

// J_0 .. J_nmax at x >= 0 by normalized downward recurrence.
std::vector<double> bessel_j_table(int nmax, double x);
double bessel_j(int n, double x);

struct CorrelationMatrix {
    Matrix c;  // c(i, j) = <c^dag_{sites[i]} c_{sites[j]}>
    std::vector<int> sites;
};

CorrelationMatrix correlation_dimer(double t, const std::vector<int>& sites);
// Rows and columns of A1 u A2 (A1 first); geometry sites are shifted by offset.
CorrelationMatrix restrict(const CorrelationMatrix& c, const TripartiteGeometry& g, int offset = 0);

// clip: eigenvalues within cutoff of 0 or 1 are moved to cutoff / 1 - cutoff.
// truncate: those modes get h = 0, i.e. they are dropped from the operator.
enum class CutoffMode { clip, truncate };

enum class OperatorLabel { K, N_full, N_real, N_imag, N_diag, N_offdiag };

struct OperatorMatrix {
    Matrix m;
    OperatorLabel label = OperatorLabel::K;
};

struct ModeSpectrum {
    std::vector<cplx> h;
    bool reduced = false;
};

OperatorMatrix entanglement_hamiltonian(const Matrix& c, double cutoff = 1e-8,
                                        CutoffMode mode = CutoffMode::truncate);

// Covariance of the time-reversed state in the frame where A1 is particle-hole
// transformed: [[1 - C11, i C12], [i C21, C22]]. Same size as C.
Matrix time_reversed_covariance(const Matrix& c, int l1);

// Particle-hole doubled form, 2x2 site blocks [[<c^dag_i c_j>, <c_i c_j>], [<c^dag_i c^dag_j>, <c_i c^dag_j>]].
Matrix bdg_embed(const Matrix& c);
Matrix fermionic_partial_transpose(const Matrix& c, int l1);
// Applies the cross-block map to an existing BdG matrix (for the involution checks).
Matrix apply_cross_map(const Matrix& bdg, int l1);

struct EigenDiagnostics {
    double condition = 0.0;
    double max_residual = 0.0;
    int clipped = 0;
    int branch_cut = 0;
};

struct NegativityHamiltonian {
    OperatorMatrix n;
    ModeSpectrum spectrum;  // h for every eigenvalue of Gamma
    EigenDiagnostics diag;
};

NegativityHamiltonian negativity_hamiltonian(const Matrix& gamma, double cutoff = 1e-8,
                                             CutoffMode mode = CutoffMode::truncate,
                                             bool build_operator = true);

// Spectrum only; scalar sums use clip semantics.
ModeSpectrum negativity_spectrum(const Matrix& gamma, double cutoff = 1e-8);

// K of the two intervals in the frame of time_reversed_covariance:
// -K on A1, K on A2, cross blocks dropped.
Matrix embed_reduced_frame(const Matrix& k, int l1);
// [[K, 0], [0, -K^T]] in site-block ordering.
Matrix embed_bdg(const Matrix& k);

struct Decomposition {
    OperatorMatrix real, imag, diag, offdiag;
};
Decomposition decompose(const OperatorMatrix& n, const Matrix& k_embedded);

// Keep h_R > 0; values on the imaginary axis (doubled in BdG) at half multiplicity.
ModeSpectrum particle_hole_reduce(const ModeSpectrum& full, double tol = 1e-9);

// Renyi negativity from single-particle h (alpha = 1: log negativity).
double renyi_negativity_exact(const ModeSpectrum& s, int alpha);
// Same quantity by composing Gaussian covariances; G is the reduced-frame covariance.
double renyi_negativity_composed(const Matrix& g, int alpha);
double renyi_entropy_exact(const Matrix& c, int alpha);

struct OffdiagSample {
    int x = 0;  // site in A2 (lattice view)
    int y = 0;  // site in A1
    int z = 0;  // x - y
    cplx value;
    cplx deoscillated;  // (-1)^x value
};
// Pairing coefficients between A2 and A1 of a reduced-frame operator.
std::vector<OffdiagSample> extract_offdiag_profile(const Matrix& n_offdiag, const TripartiteGeometry& g);

double commutator_ratio(const Matrix& a, const Matrix& b);

// Per-time observables of the dimer quench.
struct SweepOptions {
    std::vector<int> alphas{1, 2, 3, 4};
    double cutoff = 1e-8;
    int offset = 0;
};

struct SweepPoint {
    double t = 0.0;
    int alpha = 1;
    double entropy = 0.0;       // S_alpha of A1 u A2
    double negativity = 0.0;    // E_alpha from the h spectrum
    double composed = 0.0;      // E_alpha by covariance composition
    double log_ratio = 0.0;     // negativity + (alpha - 1) entropy
    double log_ratio_composed = 0.0;
};

// Reduced N x N frame, OpenMP over time points.
std::vector<SweepPoint> sweep_parallel(const TripartiteGeometry& g, const std::vector<double>& times,
                                       const SweepOptions& opt);
// 2N particle-hole doubled frame, single thread. Reference for sweep_parallel.
std::vector<SweepPoint> sweep_serial(const TripartiteGeometry& g, const std::vector<double>& times,
                                     const SweepOptions& opt);

}  // namespace negham::gauss
