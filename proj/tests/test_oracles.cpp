#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "negham/gaussian.hpp"
#include "negham/harness.hpp"
#include "negham/oracles.hpp"

using namespace negham;
using namespace negham::oracle;

namespace {

const cplx I(0.0, 1.0);
const StateKind kinds[2] = {StateKind::squeezed, StateKind::symmetric};

double maxabs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<double> sorted_real_eigs(const Matrix4& m)
{
    const auto ev = Eigen::ComplexEigenSolver<Matrix4>(m, false).eigenvalues();
    std::vector<double> out;
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(ev(i).imag()) < 1e-12);
        out.push_back(ev(i).real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("pair operators")
{
    const auto& ops = PairOps::get();
    CHECK(maxabs(ops.c1 * ops.c2 + ops.c2 * ops.c1) < 1e-15);
    CHECK(maxabs(ops.c1 * ops.c1.adjoint() + ops.c1.adjoint() * ops.c1 - ops.id) < 1e-15);
    CHECK(maxabs(ops.c1 * ops.c2.adjoint() + ops.c2.adjoint() * ops.c1) < 1e-15);
    // c2^dag c1^dag |00> = +|11>
    Eigen::Vector4cd vac = Eigen::Vector4cd::Zero();
    vac(0) = 1.0;
    const Eigen::Vector4cd both = ops.c2.adjoint() * ops.c1.adjoint() * vac;
    CHECK(both(3) == cplx(1.0));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const Matrix4 ac = ops.majorana[a] * ops.majorana[b] + ops.majorana[b] * ops.majorana[a];
            CHECK(maxabs(ac - (a == b ? 2.0 : 0.0) * ops.id) < 1e-15);
        }
}

TEST_CASE("pair states")
{
    for (StateKind kind : kinds) {
        const auto zero = pair_state(kind, 0.0, 0.4);
        CHECK(Eigen::FullPivLU<Matrix4>(zero.m).rank() == 1);
        for (double n : {0.0, 0.2, 0.5, 0.9, 1.0}) {
            const auto r = pair_state(kind, n, 1.1);
            CHECK(std::abs(r.m.trace() - 1.0) < 1e-15);
            CHECK(maxabs(r.m - r.m.adjoint()) < 1e-15);
            CHECK(sorted_real_eigs(r.m).front() > -1e-15);
        }
    }
    const auto ev = sorted_real_eigs(pair_state(StateKind::squeezed, 0.5, 0.3).m);
    CHECK(std::abs(ev[0]) < 1e-15);
    CHECK(std::abs(ev[2]) < 1e-15);
    CHECK(ev[3] == doctest::Approx(1.0));
    CHECK_THROWS_AS(pair_state(StateKind::squeezed, 1.5, 0.0), DomainError);
}

TEST_CASE("pair transpose")
{
    for (double n : {0.1, 0.3, 0.75}) {
        const auto r = pair_state(StateKind::squeezed, n, 0.9);
        const Matrix4 t1 = transpose_mode1(r.m);
        std::vector<double> want{n, 1 - n, std::sqrt(n * (1 - n)), -std::sqrt(n * (1 - n))};
        std::sort(want.begin(), want.end());
        const auto got = sorted_real_eigs(t1);
        for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        CHECK(maxabs(transpose_mode1(t1) - r.m) < 1e-15);

        const auto& ops = PairOps::get();
        const Matrix4 ts = transpose_mode1(pair_state(StateKind::symmetric, n, 0.9).m);
        const Matrix4 q = ops.n2 - ops.n1;
        CHECK(maxabs(ts * q - q * ts) < 1e-15);
    }
}

TEST_CASE("pair time reversal")
{
    for (StateKind kind : kinds)
        for (double n : {0.2, 0.6}) {
            const auto r = pair_state(kind, n, 0.7);
            const Matrix4 rc = time_reversal_mode1_coherent(r.m);
            // coherent convention: the transposed pair with its coherences times i
            Matrix4 want = transpose_mode1(r.m);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    if (i != j) want(i, j) *= I;
            CHECK(maxabs(rc - want) < 1e-14);
            const Matrix4 t1 = transpose_mode1(r.m);
            CHECK(maxabs((1.0 - I) / 2.0 * rc + (1.0 + I) / 2.0 * rc.adjoint() - t1) < 1e-14);
            // traces do not depend on the frame
            const Matrix4 rm = time_reversal_mode1(r.m);
            CHECK(std::abs((rm * rm.adjoint()).trace() - (rc * rc.adjoint()).trace()) < 1e-14);
        }
}

TEST_CASE("exponential forms at n=0.3, phi=0.7")
{
    for (StateKind kind : kinds) {
        const auto rep = verify_exponential_forms(kind, 0.3, 0.7);
        CHECK(rep.transpose_form < 1e-12);
        CHECK(rep.reversal_form < 1e-12);
        CHECK(rep.o_square < 1e-12);
        CHECK(rep.o_commutator < 1e-12);
        CHECK(rep.of_quartic < 1e-12);
        CHECK(rep.combination < 1e-14);
        CHECK(rep.reversal_square < 1e-12);
        CHECK(rep.ph_replacement < 1e-12);
        for (double e : rep.o_spectrum) CHECK(std::min({std::abs(e), std::abs(e - 2), std::abs(e + 2)}) < 1e-12);
        for (double e : rep.of_spectrum) CHECK(std::min({std::abs(e), std::abs(e - 1), std::abs(e + 1)}) < 1e-12);
    }
    CHECK_THROWS_AS(verify_exponential_forms(StateKind::squeezed, 0.0, 0.1), DomainError);
}

TEST_CASE("pair traces")
{
    const auto r = pair_state(StateKind::squeezed, 0.3, 0.4);
    CHECK(pair_traces(r, 3).transposed.real() == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(pair_traces(r, 2).transposed.real() == doctest::Approx(1.0).epsilon(1e-12));
    for (StateKind kind : kinds)
        for (double n : {0.05, 0.3, 0.5, 0.85})
            for (int a = 1; a <= 6; ++a) {
                const auto tr = pair_traces(pair_state(kind, n, 2.1), a);
                CHECK(std::abs(tr.fermionic - tr.transposed) < 1e-12);
            }
    CHECK_THROWS_AS(pair_traces(r, 0), DomainError);
}

TEST_CASE("AB split")
{
    for (StateKind kind : kinds) {
        auto [a, b] = ab_split(kind, 0.35, 1.2);
        CHECK(maxabs(a + b - transpose_mode1(pair_state(kind, 0.35, 1.2).m)) < 1e-15);
        CHECK(maxabs(a * b) < 1e-15);
        Matrix4 ap = Matrix4::Identity(), bp = Matrix4::Identity(), tp = Matrix4::Identity();
        for (int p = 1; p <= 5; ++p) {
            ap = (ap * a).eval();
            bp = (bp * b).eval();
            tp = (tp * (a + b)).eval();
            CHECK(maxabs(ap - a_power_closed(kind, 0.35, p)) < 1e-12);
            CHECK(maxabs(bp - b_power_closed(kind, 0.35, 1.2, p)) < 1e-12);
            CHECK(std::abs(tp.trace() - ap.trace() - bp.trace()) < 1e-12);
        }
    }
}

TEST_CASE("matrix exponential")
{
    const Matrix4 z = Matrix4::Zero();
    CHECK(maxabs(expm(z) - Matrix4::Identity()) < 1e-15);
    Matrix4 d = Matrix4::Zero();
    d.diagonal() << 0.1, -0.3, I, 2.0;
    for (int i = 0; i < 4; ++i) CHECK(std::abs(expm(d)(i, i) - std::exp(d(i, i))) < 1e-14);
}

TEST_CASE("dense state from a covariance")
{
    Matrix half(1, 1);
    half(0, 0) = 0.5;
    const auto s1 = dense_from_covariance(half);
    CHECK(s1.modes == 1);
    CHECK(maxabs(s1.rho - Matrix::Identity(2, 2) * 0.5) < 1e-15);

    const Matrix c = gauss::correlation_dimer(3.0, TripartiteGeometry(3, 3, 2).sites(1)).c;
    const auto st = dense_from_covariance(c);
    CHECK(std::abs(st.rho.trace() - 1.0) < 1e-12);
    CHECK(maxabs(st.rho - st.rho.adjoint()) < 1e-12);
    CHECK(maxabs(measure_correlation(st.rho, st.modes) - c) < 1e-10);
    double s = 0.0;
    const Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    for (double nu : es.eigenvalues()) {
        nu = std::clamp(nu, 1e-300, 1.0 - 1e-16);
        s -= nu * std::log(nu) + (1 - nu) * std::log(1 - nu);
    }
    CHECK(von_neumann_entropy(st.rho) == doctest::Approx(s).epsilon(1e-9));
    CHECK_THROWS_AS(dense_from_covariance(Matrix::Identity(13, 13) * 0.5), DomainError);
}

TEST_CASE("dense annihilators anticommute")
{
    const int m = 3;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const Matrix ca = dense_annihilator(a, m), cb = dense_annihilator(b, m);
            CHECK(maxabs(ca * cb + cb * ca) < 1e-15);
            const Matrix want = (a == b ? 1.0 : 0.0) * Matrix::Identity(8, 8);
            CHECK(maxabs(ca * cb.adjoint() + cb.adjoint() * ca - want) < 1e-15);
        }
}

TEST_CASE("dense time reversal of a block product has zero negativity")
{
    Matrix c = gauss::correlation_dimer(2.5, TripartiteGeometry(3, 3, 2).sites(1)).c;
    c.topRightCorner(3, 3).setZero();
    c.bottomLeftCorner(3, 3).setZero();
    const auto st = dense_from_covariance(c);
    const Matrix r = dense_time_reversal(st.rho, st.modes, 3);
    CHECK(std::abs(dense_renyi_negativity(r, 1)) < 1e-12);
    CHECK_THROWS_AS(dense_time_reversal(Matrix::Identity(2048, 2048), 11, 3), DomainError);
}

TEST_CASE("dense oracle at l1=l2=3, d=2, t=4")
{
    const Matrix c = gauss::correlation_dimer(4.0, TripartiteGeometry(3, 3, 2).sites(1)).c;
    const auto st = dense_from_covariance(c);
    const Matrix r = dense_time_reversal(st.rho, st.modes, 3);
    const Matrix g = gauss::time_reversed_covariance(c, 3);
    for (int a = 1; a <= 4; ++a) {
        const double dense = dense_renyi_negativity(r, a);
        CHECK(dense == doctest::Approx(gauss::renyi_negativity_composed(g, a)).epsilon(1e-8));
        MESSAGE("alpha=" << a << " dense=" << dense << " h-formula="
                         << gauss::renyi_negativity_exact(gauss::negativity_spectrum(g, 1e-12), a));
    }
}

TEST_CASE("trace norm survives clustered singular values")
{
    // rank-one projector split in two: singular values {0.5, 0.5}
    Matrix r = Matrix::Zero(4, 4);
    r(0, 0) = 0.5;
    r(1, 2) = 0.5 * I;
    CHECK(dense_renyi_negativity(r, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(dense_renyi_negativity(r, 2) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("pair suite passes on a coarse grid")
{
    const auto checks = harness::pair_suite(6);
    for (const auto& c : checks)
        if (c.counted) CHECK_MESSAGE(c.pass, c.name << " value " << c.value);
    CHECK(harness::all_pass(checks));
}

TEST_CASE("dense suite passes up to six modes")
{
    const auto checks = harness::dense_suite(6, 2, {0.0, 3.0, 8.0});
    for (const auto& c : checks)
        if (c.counted) CHECK_MESSAGE(c.pass, c.name << " value " << c.value);
    CHECK(harness::all_pass(checks));
}
