#include "negham/oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace negham::oracle {

namespace {

const cplx I(0.0, 1.0);

Matrix4 adj(const Matrix4& a) { return a.adjoint(); }

double maxabs(const Matrix4& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

const PairOps& PairOps::get()
{
    static const PairOps ops = [] {
        PairOps o;
        o.c1.setZero();
        o.c2.setZero();
        for (int b = 0; b < 4; ++b) {
            const int n1 = b & 1, n2 = b >> 1;
            if (n2) o.c2(b ^ 2, b) = 1.0;
            if (n1) o.c1(b ^ 1, b) = n2 ? -1.0 : 1.0;
        }
        o.id = Matrix4::Identity();
        o.n1 = adj(o.c1) * o.c1;
        o.n2 = adj(o.c2) * o.c2;
        o.majorana = {o.c1 + adj(o.c1), I * (adj(o.c1) - o.c1), o.c2 + adj(o.c2), I * (adj(o.c2) - o.c2)};
        return o;
    }();
    return ops;
}

Matrix4 expm(const Matrix4& a) { return a.exp(); }

PairDensityMatrix pair_state(StateKind kind, double n, double phi)
{
    if (!(n >= 0.0 && n <= 1.0)) throw DomainError("pair_state: n must lie in [0,1]");
    const auto& o = PairOps::get();
    const double q = std::sqrt(n * (1.0 - n));
    const cplx e = std::polar(1.0, phi);
    Matrix4 m;
    if (kind == StateKind::squeezed)
        m = n * o.n2 * o.n1 + (1.0 - n) * (o.id - o.n2) * (o.id - o.n1) +
            q * (e * adj(o.c2) * adj(o.c1) + std::conj(e) * o.c1 * o.c2);
    else
        m = n * o.n2 * (o.id - o.n1) + (1.0 - n) * (o.id - o.n2) * o.n1 +
            q * (e * adj(o.c2) * o.c1 + std::conj(e) * adj(o.c1) * o.c2);
    return {m, kind, n, phi};
}

Matrix4 transpose_mode1(const Matrix4& rho)
{
    Matrix4 out;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const int a1 = a & 1, a2 = a >> 1, b1 = b & 1, b2 = b >> 1;
            out(b1 + 2 * a2, a1 + 2 * b2) = rho(a, b);
        }
    return out;
}

Matrix4 time_reversal_mode1(const Matrix4& rho)
{
    const auto& o = PairOps::get();
    Matrix4 out = Matrix4::Zero();
    for (int mask = 0; mask < 16; ++mask) {
        Matrix4 p = o.id;
        int m = 0;
        for (int a = 0; a < 4; ++a)
            if (mask >> a & 1) {
                p = p * o.majorana[a];
                if (a < 2) ++m;
            }
        const cplx w = (p.adjoint() * rho).trace() / 4.0;
        out += w * std::pow(I, m) * p;
    }
    return out;
}

Matrix4 time_reversal_mode1_coherent(const Matrix4& rho)
{
    const auto& o = PairOps::get();
    const Matrix4 u = o.c1 + adj(o.c1);
    return adj(u * time_reversal_mode1(rho) * adj(u));
}

namespace {

// e c2^dag c1 + h.c. (squeezed) or e c2^dag c1^dag + h.c. (symmetric)
Matrix4 coherence(StateKind kind, double phi)
{
    const auto& o = PairOps::get();
    const cplx e = std::polar(1.0, phi);
    if (kind == StateKind::squeezed) return e * adj(o.c2) * o.c1 + std::conj(e) * adj(o.c1) * o.c2;
    return e * adj(o.c2) * adj(o.c1) + std::conj(e) * o.c1 * o.c2;
}

Matrix4 diagonal_part(StateKind kind, double n)
{
    const auto& o = PairOps::get();
    if (kind == StateKind::squeezed) return n * o.n2 * o.n1 + (1.0 - n) * (o.id - o.n2) * (o.id - o.n1);
    return n * o.n2 * (o.id - o.n1) + (1.0 - n) * (o.id - o.n2) * o.n1;
}

// Projector that B^p lands on for even p.
Matrix4 b_even_projector(StateKind kind)
{
    const auto& o = PairOps::get();
    if (kind == StateKind::squeezed) return o.n2 * (o.id - o.n1) + o.n1 * (o.id - o.n2);
    return o.n2 * o.n1 + (o.id - o.n2) * (o.id - o.n1);
}

}  // namespace

Matrix4 closed_transposed(StateKind kind, double n, double phi)
{
    return diagonal_part(kind, n) + std::sqrt(n * (1.0 - n)) * coherence(kind, phi);
}

Matrix4 closed_time_reversed(StateKind kind, double n, double phi)
{
    return diagonal_part(kind, n) + I * std::sqrt(n * (1.0 - n)) * coherence(kind, phi);
}

Matrix4 operator_o(StateKind kind, double phi)
{
    return b_even_projector(kind) - coherence(kind, phi);
}

Matrix4 operator_of(StateKind kind, double phi) { return coherence(kind, phi); }

Matrix4 number_combination(StateKind kind)
{
    const auto& o = PairOps::get();
    if (kind == StateKind::squeezed) return o.n1 + o.n2;
    return o.n2 + o.id - o.n1;
}

std::pair<Matrix4, Matrix4> ab_split(StateKind kind, double n, double phi)
{
    return {diagonal_part(kind, n), std::sqrt(n * (1.0 - n)) * coherence(kind, phi)};
}

Matrix4 a_power_closed(StateKind kind, double n, int p)
{
    return diagonal_part(kind, 1.0) * std::pow(n, p) + (diagonal_part(kind, 0.0)) * std::pow(1.0 - n, p);
}

Matrix4 b_power_closed(StateKind kind, double n, double phi, int p)
{
    const double s = std::pow(n * (1.0 - n), 0.5 * p);
    return p % 2 ? Matrix4(s * coherence(kind, phi)) : Matrix4(s * b_even_projector(kind));
}

double ExponentialReport::max_deviation() const
{
    return std::max({transpose_form, reversal_form, o_square, o_commutator, of_quartic, combination,
                     reversal_square, ph_replacement});
}

namespace {

std::array<double, 4> hermitian_spectrum(const Matrix4& a)
{
    Eigen::SelfAdjointEigenSolver<Matrix4> es(a);
    std::array<double, 4> s{};
    for (int i = 0; i < 4; ++i) s[i] = es.eigenvalues()(i);
    return s;
}

double quartic_weight(const Matrix4& a)
{
    const auto& o = PairOps::get();
    const Matrix4 p = o.majorana[0] * o.majorana[1] * o.majorana[2] * o.majorana[3];
    return std::abs((p.adjoint() * a).trace()) / 4.0;
}

}  // namespace

ExponentialReport verify_exponential_forms(StateKind kind, double n, double phi)
{
    if (!(n > 0.0 && n < 1.0)) throw DomainError("verify_exponential_forms: n must lie in (0,1)");
    const auto& o = PairOps::get();
    const double et = eta(n);
    const double z = 1.0 + std::exp(-et);
    const Matrix4 rho = pair_state(kind, n, phi).m;
    const Matrix4 t1 = transpose_mode1(rho);
    const Matrix4 r1 = time_reversal_mode1_coherent(rho);
    const Matrix4 nn = number_combination(kind);
    const Matrix4 op = operator_o(kind, phi);
    const Matrix4 of = operator_of(kind, phi);

    ExponentialReport r;
    r.transpose_form = maxabs(expm(-0.5 * et * nn + I * (pi / 2) * op) / z - t1);
    r.reversal_form = maxabs(expm(-0.5 * et * nn + I * (pi / 2) * of) / z - r1);
    r.o_square = maxabs(op * op - 2.0 * op);
    r.o_commutator = maxabs(op * nn - nn * op);
    r.of_quartic = quartic_weight(of);
    r.combination = maxabs((1.0 - I) / 2.0 * r1 + (1.0 + I) / 2.0 * adj(r1) - t1);
    r.reversal_square = maxabs(r1 * adj(r1) - expm(-et * nn) / (z * z));
    // Particle-hole on mode 1 maps c2^dag c1^dag to -c2^dag c1, hence phi + pi.
    const Matrix4 u = o.c1 + adj(o.c1);
    r.ph_replacement = maxabs(u * pair_state(StateKind::squeezed, n, phi).m * adj(u) -
                              pair_state(StateKind::symmetric, n, phi + pi).m);
    r.o_spectrum = hermitian_spectrum(op);
    r.of_spectrum = hermitian_spectrum(of);
    return r;
}

namespace {

template <class M>
M mpow(const M& a, int p)
{
    M out = M::Identity(a.rows(), a.cols());
    for (int i = 0; i < p; ++i) out = out * a;
    return out;
}

}  // namespace

PairTraces pair_traces(const PairDensityMatrix& rho, int alpha, double lambda)
{
    if (alpha < 1) throw DomainError("pair_traces: alpha must be >= 1");
    const auto& o = PairOps::get();
    const Matrix4 t1 = transpose_mode1(rho.m);
    const Matrix4 r1 = time_reversal_mode1(rho.m);
    const Matrix4 rr = r1 * adj(r1);
    PairTraces out;
    out.transposed = mpow(t1, alpha).trace();
    out.fermionic = alpha % 2 ? (mpow(rr, (alpha - 1) / 2) * r1).trace() : mpow(rr, alpha / 2).trace();
    const Matrix4 charge = (I * lambda * (o.n2 - o.n1)).exp();
    out.charged = (charge * mpow(t1, alpha)).trace();
    return out;
}

namespace {

// (sign, target) of c^dag_i c_j acting on basis state b; sign 0 if it annihilates.
inline int hop(int i, int j, unsigned b, unsigned& out)
{
    if (!(b >> j & 1u)) return 0;
    unsigned s = b & ~(1u << j);
    int sign = (std::popcount(s & ((1u << j) - 1u)) % 2) ? -1 : 1;
    if (s >> i & 1u) return 0;
    if (std::popcount(s & ((1u << i) - 1u)) % 2) sign = -sign;
    out = s | (1u << i);
    return sign;
}

}  // namespace

Matrix dense_annihilator(int j, int modes)
{
    const unsigned dim = 1u << modes;
    Matrix c = Matrix::Zero(dim, dim);
    for (unsigned b = 0; b < dim; ++b)
        if (b >> j & 1u) c(b ^ (1u << j), b) = (std::popcount(b & ((1u << j) - 1u)) % 2) ? -1.0 : 1.0;
    return c;
}

DenseGaussianState dense_from_covariance(const Matrix& c)
{
    const int n = static_cast<int>(c.rows());
    if (n > max_state_modes) throw DomainError("dense_from_covariance: more than 12 modes");
    const int dim = 1 << n;
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    const Matrix& u = es.eigenvectors();
    // rho is the product over eigenmodes of nu n_k + (1 - nu)(1 - n_k).
    Matrix rho = Matrix::Identity(dim, dim);
    for (int k = 0; k < n; ++k) {
        const double nu = std::clamp(es.eigenvalues()(k), 0.0, 1.0);
        Matrix nk = Matrix::Zero(dim, dim);
        for (unsigned b = 0; b < unsigned(dim); ++b)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    unsigned t;
                    const int s = hop(i, j, b, t);
                    if (s) nk(t, b) += double(s) * std::conj(u(i, k)) * u(j, k);
                }
        const Matrix f = (1.0 - nu) * Matrix::Identity(dim, dim) + (2.0 * nu - 1.0) * nk;
        rho = (rho * f).eval();
    }
    return {n, rho};
}

Matrix measure_correlation(const Matrix& rho, int modes)
{
    Matrix c = Matrix::Zero(modes, modes);
    for (int i = 0; i < modes; ++i)
        for (int j = 0; j < modes; ++j) {
            cplx acc = 0.0;
            for (unsigned b = 0; b < unsigned(rho.rows()); ++b) {
                unsigned t;
                const int s = hop(i, j, b, t);
                if (s) acc += double(s) * rho(b, t);
            }
            c(i, j) = acc;
        }
    return c;
}

double von_neumann_entropy(const Matrix& rho)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (double p : es.eigenvalues())
        if (p > 1e-300) s -= p * std::log(p);
    return s;
}

namespace {

// A Majorana monomial as i^phase X^x Z^z.
struct Pauli {
    unsigned x = 0, z = 0;
    int phase = 0;
};

Pauli multiply(const Pauli& a, const Pauli& b)
{
    Pauli r;
    r.x = a.x ^ b.x;
    r.z = a.z ^ b.z;
    r.phase = (a.phase + b.phase + 2 * (std::popcount(a.z & b.x) % 2)) % 4;
    return r;
}

Pauli majorana(int a)
{
    const int j = a / 2;
    Pauli p;
    p.x = 1u << j;
    p.z = (1u << j) - 1u;
    if (a % 2) {
        p.z |= 1u << j;
        p.phase = 1;
    }
    return p;
}

}  // namespace

Matrix dense_time_reversal(const Matrix& rho, int modes, int l1)
{
    if (modes > max_reversal_modes) throw DomainError("dense_time_reversal: more than 10 modes");
    if (rho.rows() != (1 << modes)) throw DomainError("dense_time_reversal: dimension mismatch");
    const unsigned dim = 1u << modes;
    const cplx ipow[4] = {1.0, I, -1.0, -I};
    std::vector<Pauli> gam(2 * modes);
    for (int a = 0; a < 2 * modes; ++a) gam[a] = majorana(a);
    Matrix out = Matrix::Zero(dim, dim);
    const unsigned long masks = 1ul << (2 * modes);
    for (unsigned long mask = 0; mask < masks; ++mask) {
        Pauli p;
        int m = 0;
        for (int a = 0; a < 2 * modes; ++a)
            if (mask >> a & 1ul) {
                p = multiply(p, gam[a]);
                if (a < 2 * l1) ++m;
            }
        // P(b ^ x, b) = i^phase (-1)^{z.b}
        cplx w = 0.0;
        for (unsigned b = 0; b < dim; ++b) {
            const double s = (std::popcount(p.z & b) % 2) ? -1.0 : 1.0;
            w += s * rho(b ^ p.x, b);
        }
        w *= std::conj(ipow[p.phase]) / double(dim);
        if (std::abs(w) < 1e-300) continue;
        const cplx coef = w * ipow[m % 4] * ipow[p.phase];
        for (unsigned b = 0; b < dim; ++b) {
            const double s = (std::popcount(p.z & b) % 2) ? -1.0 : 1.0;
            out(b ^ p.x, b) += coef * s;
        }
    }
    return out;
}

double dense_renyi_negativity(const Matrix& r, int alpha)
{
    if (alpha < 1) throw DomainError("alpha must be >= 1");
    if (alpha == 1) {
        // BDCSVD misplaces clustered singular values here; the Hermitian dilation has
        // eigenvalues +-sigma and a self-adjoint solver gets them to absolute precision.
        const Eigen::Index n = r.rows();
        Matrix dil = Matrix::Zero(2 * n, 2 * n);
        dil.topRightCorner(n, n) = r;
        dil.bottomLeftCorner(n, n) = r.adjoint();
        Eigen::SelfAdjointEigenSolver<Matrix> es(dil, Eigen::EigenvaluesOnly);
        return std::log(0.5 * es.eigenvalues().cwiseAbs().sum());
    }
    const Matrix rr = r * r.adjoint();
    Matrix p = Matrix::Identity(r.rows(), r.cols());
    for (int i = 0; i < alpha / 2; ++i) p = (p * rr).eval();
    if (alpha % 2) p = (p * r).eval();
    return std::log(p.trace().real());
}

}  // namespace negham::oracle
