#include "reference.hpp"

#include <gtest/gtest.h>

using namespace qdb;

TEST(Rmatrix, Theta) {
    EXPECT_EQ(theta(1), 1);
    EXPECT_EQ(theta(0), 0);
    EXPECT_EQ(theta(-5), 0);
}

TEST(Rmatrix, SeriesCaseData) {
    EXPECT_THROW(SeriesCase('B', 1), RankOutOfRange);
    EXPECT_THROW(SeriesCase('C', 2), RankOutOfRange);
    EXPECT_THROW(SeriesCase('D', 3), RankOutOfRange);
    EXPECT_THROW(SeriesCase('A', 0), RankOutOfRange);
    EXPECT_THROW(SeriesCase('E', 6), UnknownCase);
    SeriesCase b2('B', 2), c3('C', 3), d4('D', 4);
    EXPECT_EQ(b2.N(), 5);
    EXPECT_EQ(c3.N(), 6);
    EXPECT_EQ(d4.N(), 8);
    EXPECT_EQ(SeriesCase('A', 2).N(), 3);
    EXPECT_EQ(c3.eps(), -1);
    EXPECT_EQ(b2.eps(), 1);
    EXPECT_EQ(b2.conj(3), 3);
    EXPECT_EQ(c3.conj(1), 6);
    // so_N: rho_i = N/2 - i; sp_N: rho_i = N/2 + 1 - i; rho_{i'} = -rho_i
    EXPECT_EQ(b2.rho(1), mkq(3, 2));
    EXPECT_EQ(b2.rho(3), 0);
    EXPECT_EQ(b2.rho(5), mkq(-3, 2));
    EXPECT_EQ(c3.rho(1), 3);
    EXPECT_EQ(c3.rho(6), -3);
    EXPECT_EQ(d4.rho(4), 0);
    EXPECT_EQ(d4.rho(5), 0);
    for (int i = 1; i <= 3; ++i) EXPECT_EQ(c3.eps_i(i), 1);
    for (int i = 4; i <= 6; ++i) EXPECT_EQ(c3.eps_i(i), -1);
}

TEST(Rmatrix, TypeAThreeMatchesReference) { EXPECT_EQ(closed_R_typeA(3), ref::sl3_reference()); }

TEST(Rmatrix, TypeATwo) {
    Matrix r = closed_R_typeA(2);
    Matrix want(4, 4);
    want.set(0, 0, Scalar::q(2));
    want.set(1, 1, Scalar::q(1));
    want.set(2, 2, Scalar::q(1));
    want.set(3, 3, Scalar::q(2));
    want.set(1, 2, Scalar::q(2) - Scalar(1));
    EXPECT_EQ(r, want);
}

TEST(Rmatrix, TypeAEntriesAndTriangularity) {
    for (int n = 1; n <= 5; ++n) {
        Matrix r = closed_R_typeA(n);
        Scalar q2m1 = Scalar::q(2) - Scalar(1);
        r.for_each([&](int row, int col, const Scalar& v) {
            EXPECT_TRUE(v == Scalar::q(2) || v == Scalar::q(1) || v == q2m1);
            if (row == col) {
                EXPECT_TRUE(v == Scalar::q(2) || v == Scalar::q(1));
            }
            // row (i,k) col (j,l): off-diagonal entries sit at (i,k) -> (k,i) with i < k
            if (row != col) {
                int i = row / n, k = row % n;
                EXPECT_EQ(col, k * n + i);
                EXPECT_LT(i, k);
            }
        });
    }
}

TEST(Rmatrix, BCDSubstitutions) {
    SeriesCase b2('B', 2);
    Matrix r = closed_R_BCD(b2);
    // i = j = k = l = 3, the self-conjugate index
    EXPECT_EQ(r.get(2 * 5 + 2, 2 * 5 + 2), Scalar::q(1));
    SeriesCase c3('C', 3);
    EXPECT_EQ(Scalar::q(-c3.rho(1), c3.eps_i(1)), Scalar::q(-3));
    EXPECT_THROW(closed_R_BCD(SeriesCase('A', 2)), UnknownCase);
}

TEST(Rmatrix, PairsCertify) {
    for (int n = 1; n <= 3; ++n) {
        Matrix r = closed_R_typeA(n + 1), rp = build_Rprime(r, RprimeFamily::TypeA);
        EXPECT_TRUE(qybe_holds(r));
        EXPECT_TRUE(qybe_holds(rp));
        EXPECT_TRUE(hecke_pair_check(r, rp));
        EXPECT_TRUE(mixed_qybe_check(r, rp));
    }
    for (auto [s, n] : std::vector<std::pair<char, int>>{{'B', 2}, {'C', 3}, {'D', 4}, {'B', 3}}) {
        SeriesCase sc(s, n);
        Matrix r = closed_R_BCD(sc), rp = build_Rprime(r, RprimeFamily::BCD, sc);
        EXPECT_TRUE(qybe_holds(r)) << sc.name();
        EXPECT_TRUE(hecke_pair_check(r, rp)) << sc.name();
        EXPECT_TRUE(mixed_qybe_check(r, rp)) << sc.name();
    }
}

// Outside type A the companion R' is a polynomial in PR and is not itself a braid operator.
TEST(Rmatrix, CompanionIsNotAnRMatrixOutsideTypeA) {
    SeriesCase b2('B', 2);
    Matrix r = closed_R_BCD(b2);
    EXPECT_FALSE(qybe_holds(build_Rprime(r, RprimeFamily::BCD, b2)));
}

TEST(Rmatrix, Lambda) {
    EXPECT_EQ(lambda_typeA(3), Scalar::q(mkq(-4, 3)));
    EXPECT_EQ(lambda_BCD(), Scalar::q(-1));
    EXPECT_EQ(lambda_crossing(Crossing::A1B2), Scalar::q(-2));
    EXPECT_EQ(lambda_crossing(Crossing::A2C3), Scalar::q(mkq(-4, 3)));
    EXPECT_EQ(lambda_crossing(Crossing::A3D4), Scalar::q(-1));
    EXPECT_THROW(parse_crossing("A2B3"), UnknownCase);
}

TEST(Rmatrix, Flip) {
    EXPECT_EQ(majid_flip(Matrix::identity(9)), Matrix::identity(9));
    EXPECT_EQ(majid_flip(permutation_matrix(3)), permutation_matrix(3));
    Matrix r = closed_R_typeA(3);
    EXPECT_EQ(majid_flip(majid_flip(r)), r);
    // (P R P)^{ij}_{kl} = R^{ji}_{lk}
    Matrix f = majid_flip(r);
    const int n = 3;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) EXPECT_EQ(f.get(i * n + j, k * n + l), r.get(j * n + i, l * n + k));
}

TEST(Rmatrix, ExactInverses) {
    for (auto [s, n] : std::vector<std::pair<char, int>>{{'B', 2}, {'C', 3}, {'D', 4}}) {
        Matrix r = closed_R_BCD(SeriesCase(s, n));
        Matrix inv = unipotent_inverse(r);
        EXPECT_EQ(inv * r, Matrix::identity(r.rows()));
        EXPECT_EQ(r * inv, Matrix::identity(r.rows()));
        Matrix p = permutation_matrix(tensor_root(r));
        EXPECT_EQ(r21_inverse(r) * (p * r * p), Matrix::identity(r.rows()));
    }
}

TEST(Rmatrix, MinimalPolynomials) {
    for (int dim = 2; dim <= 4; ++dim) {
        Matrix rvv = closed_R_typeA(dim).scaled(lambda_typeA(dim));
        EXPECT_TRUE(annihilates(permutation_matrix(dim) * rvv, minpoly_roots_typeA(dim)));
    }
    for (auto [s, n] : std::vector<std::pair<char, int>>{{'B', 2}, {'C', 3}, {'D', 4}}) {
        SeriesCase sc(s, n);
        Matrix rvv = closed_R_BCD(sc).scaled(lambda_BCD());
        EXPECT_TRUE(annihilates(permutation_matrix(sc.N()) * rvv, minpoly_roots_BCD(sc))) << sc.name();
        // a single missing factor is not enough
        auto roots = minpoly_roots_BCD(sc);
        roots.pop_back();
        EXPECT_FALSE(annihilates(permutation_matrix(sc.N()) * rvv, roots)) << sc.name();
    }
}
