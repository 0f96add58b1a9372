#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "negham/core.hpp"

namespace negham::oracle {

using Matrix4 = Eigen::Matrix4cd;
using Matrix = Eigen::MatrixXcd;

// Two modes, basis |n1 n2> at index n1 + 2 n2, mode 1 = the A1 member.
// The A2 member comes first in the Jordan-Wigner string, so that
// c2^dag c1^dag |00> = +|11>.
struct PairOps {
    Matrix4 c1, c2, n1, n2, id;
    std::array<Matrix4, 4> majorana;  // c1 + c1^dag, i(c1^dag - c1), same for mode 2
    static const PairOps& get();
};

struct PairDensityMatrix {
    Matrix4 m;
    StateKind kind = StateKind::squeezed;
    double n = 0.0;
    double phi = 0.0;
};

PairDensityMatrix pair_state(StateKind kind, double n, double phi);
Matrix4 transpose_mode1(const Matrix4& rho);
// i^m per Majorana monomial, m = number of mode-1 factors.
Matrix4 time_reversal_mode1(const Matrix4& rho);
// The same operation in the coherent-state convention of the closed forms:
// (U R U^dag)^dag with U = c1 + c1^dag.
Matrix4 time_reversal_mode1_coherent(const Matrix4& rho);

// Closed forms written out operator by operator.
Matrix4 closed_transposed(StateKind kind, double n, double phi);
Matrix4 closed_time_reversed(StateKind kind, double n, double phi);
Matrix4 operator_o(StateKind kind, double phi);
Matrix4 operator_of(StateKind kind, double phi);
// n1 + n2 (squeezed) or n2 + 1 - n1 (symmetric)
Matrix4 number_combination(StateKind kind);
// First and second line of the transposed pair.
std::pair<Matrix4, Matrix4> ab_split(StateKind kind, double n, double phi);
Matrix4 a_power_closed(StateKind kind, double n, int p);
Matrix4 b_power_closed(StateKind kind, double n, double phi, int p);

Matrix4 expm(const Matrix4& a);

struct ExponentialReport {
    double transpose_form = 0.0;    // exp ansatz with O vs transpose_mode1
    double reversal_form = 0.0;     // exp ansatz with O^(f) vs coherent time reversal
    double o_square = 0.0;          // ||O^2 - 2 O||
    double o_commutator = 0.0;      // ||[O, number combination]||
    double of_quartic = 0.0;        // weight of degree-4 Majorana terms in O^(f)
    double combination = 0.0;       // (1-i)/2 R + (1+i)/2 R^dag vs transpose
    double reversal_square = 0.0;   // R R^dag vs exp(-eta N)/(1+e^-eta)^2
    double ph_replacement = 0.0;    // symmetric pair = particle-hole image of squeezed pair
    std::array<double, 4> o_spectrum{};
    std::array<double, 4> of_spectrum{};
    double max_deviation() const;
};

ExponentialReport verify_exponential_forms(StateKind kind, double n, double phi);

struct PairTraces {
    cplx transposed;  // Tr (rho^T1)^alpha
    cplx fermionic;   // Tr (R R^dag)^{alpha/2} or Tr (R R^dag)^{(alpha-1)/2} R
    cplx charged;     // Tr e^{i lambda (n2 - n1)} (rho^T1)^alpha
};

PairTraces pair_traces(const PairDensityMatrix& rho, int alpha, double lambda = 0.0);

// Dense Fock space. Modes are ordered A1 then A2, bit j of a basis index is
// the occupation of mode j, c_j carries the string Z_0 .. Z_{j-1}.
struct DenseGaussianState {
    int modes = 0;
    Matrix rho;
};

Matrix dense_annihilator(int j, int modes);
DenseGaussianState dense_from_covariance(const Matrix& c);
Matrix measure_correlation(const Matrix& rho, int modes);
double von_neumann_entropy(const Matrix& rho);

// i^m rule on the 4^N Majorana monomials, m = number of factors on the first l1 modes.
Matrix dense_time_reversal(const Matrix& rho, int modes, int l1);

// alpha = 1: log Tr|R|. Even alpha: log Tr (R R^dag)^{alpha/2}. Odd: log Re Tr (R R^dag)^{(alpha-1)/2} R.
double dense_renyi_negativity(const Matrix& r, int alpha);

inline constexpr int max_state_modes = 12;
inline constexpr int max_reversal_modes = 10;

}  // namespace negham::oracle
