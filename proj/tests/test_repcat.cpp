#include "reference.hpp"

#include <gtest/gtest.h>

using namespace qdb;

namespace {

int degree(const CartanData& c, int i) {
    int k = 0;
    for (int j = 0; j < c.rank; ++j) k += (j != i && c.a[i][j] != 0);
    return k;
}

}  // namespace

TEST(Repcat, CartanData) {
    EXPECT_EQ(cartan('A', 2).a, (std::vector<std::vector<int>>{{2, -1}, {-1, 2}}));
    for (auto& d : cartan('A', 2).d) EXPECT_EQ(d, 1);
    EXPECT_EQ(cartan('B', 2).a, (std::vector<std::vector<int>>{{2, -2}, {-1, 2}}));
    CartanData d4 = cartan('D', 4);
    int trivalent = 0;
    for (int i = 0; i < 4; ++i) trivalent += degree(d4, i) == 3;
    EXPECT_EQ(trivalent, 1);
    EXPECT_THROW(cartan('C', 2), RankOutOfRange);
    for (auto [s, n] : std::vector<std::pair<char, int>>{{'A', 3}, {'B', 3}, {'C', 4}, {'D', 5}}) {
        CartanData c = cartan(s, n);
        for (int i = 0; i < n; ++i) {
            EXPECT_EQ(c.a[i][i], 2);
            EXPECT_EQ(c.gram[i][i], 2 * c.d[i]);
            for (int j = 0; j < n; ++j) EXPECT_EQ(c.d[i] * c.a[i][j], c.d[j] * c.a[j][i]);
        }
    }
}

TEST(Repcat, CatalogRepsAreRepresentations) {
    std::vector<Representation> reps;
    for (int n = 1; n <= 4; ++n) reps.push_back(vector_rep_A(n));
    for (auto [s, n] : std::vector<std::pair<char, int>>{{'B', 2}, {'B', 3}, {'C', 3}, {'C', 4}, {'D', 4}, {'D', 5}})
        reps.push_back(vector_rep(SeriesCase(s, n)));
    for (auto c : {Crossing::A1B2, Crossing::A2C3, Crossing::A3D4}) {
        reps.push_back(crossing_rep(c));
        reps.push_back(crossing_target_vector_rep(c));
    }
    reps.push_back(tensor_rep(vector_rep_A(3), vector_rep_A(3)));
    for (auto& r : reps) {
        auto bad = check_rep(r);
        EXPECT_TRUE(bad.empty()) << r.name << ": " << (bad.empty() ? "" : bad[0]);
    }
}

TEST(Repcat, CorruptedRepIsReported) {
    Representation r = vector_rep_A(1);
    r.E[0] = Matrix(2, 2);
    auto bad = check_rep(r);
    ASSERT_FALSE(bad.empty());
    bool ef = false;
    for (auto& b : bad) ef = ef || b.find("EF") != std::string::npos;
    EXPECT_TRUE(ef) << bad[0];
}

TEST(Repcat, DefiningSl2Module) {
    Representation v = vector_rep_A(1);
    EXPECT_EQ(v.dim, 2);
    int nonzero = 0;
    v.E[0].for_each([&](int, int, const Scalar&) { ++nonzero; });
    EXPECT_EQ(nonzero, 1);
    // K_1 = diag(q^{(a, mu)}) has exponents +-1
    Matrix k = v.Ki(0);
    EXPECT_TRUE(k.get(0, 0) == Scalar::q(-1) || k.get(0, 0) == Scalar::q(1));
    EXPECT_EQ(k.get(0, 0) * k.get(1, 1), Scalar(1));
}

TEST(Repcat, CrossingRepData) {
    Representation a = crossing_rep(Crossing::A1B2);
    Scalar two(q_integer(2));
    EXPECT_EQ(a.E[0].get(1, 0), two);  // E x1 = [2] x2
    EXPECT_TRUE(a.E[0].get(0, 2).is_zero());
    EXPECT_EQ(a.weights[0], (QVec{-1}));
    EXPECT_EQ(a.weights[1], (QVec{0}));
    EXPECT_EQ(a.weights[2], (QVec{1}));
    Representation c = crossing_rep(Crossing::A2C3);
    EXPECT_EQ(c.E[0].get(3, 1), two);  // E1 x2 = (q + q^-1) x4
    EXPECT_EQ(c.fundamental_coords(0), (QVec{-2, 0}));
    Representation d = crossing_rep(Crossing::A3D4);
    EXPECT_EQ(d.E[1].get(1, 0), Scalar(1));  // E2 x1 = x2
    EXPECT_EQ(d.F[2].get(1, 2), Scalar(1));  // F3 x3 = x2
    // weight of x6 is -2 lambda_1 + 2 a1 + 2 a2 + a3
    QVec w6 = d.cartan.fundamental(0);
    for (auto& x : w6) x *= -2;
    w6[0] += 2, w6[1] += 2, w6[2] += 1;
    EXPECT_EQ(d.weights[5], w6);
}

TEST(Repcat, RootVectors) {
    Representation a1 = vector_rep_A(1);
    auto r1 = root_vectors(a1, {0});
    ASSERT_EQ(r1.size(), 1u);
    EXPECT_EQ(r1[0].E, a1.E[0]);

    Representation a2 = vector_rep_A(2);
    auto r2 = root_vectors(a2, {0, 1, 0});
    ASSERT_EQ(r2.size(), 3u);
    // the middle root of the word (1,2,1) is a1 + a2 with E = [E1, E2]_{q^-1}
    EXPECT_EQ(r2[1].beta, (QVec{1, 1}));
    EXPECT_EQ(r2[1].E, a2.E[0] * a2.E[1] - (a2.E[1] * a2.E[0]).scaled(Scalar::q(-1)));

    Representation a3 = vector_rep_A(3);
    auto r3 = root_vectors(a3, a3.cartan.longest_word());
    ASSERT_EQ(r3.size(), 6u);
    for (auto& rv : r3) {
        EXPECT_FALSE(rv.E.is_zero());
        EXPECT_TRUE((rv.E * rv.E).is_zero());
    }
    EXPECT_THROW(root_vectors(a2, {0, 0, 1}), NotReduced);
    EXPECT_THROW(root_vectors(a2, {0, 1}), NotReduced);
}

TEST(Repcat, WeightOperator) {
    Representation v = crossing_rep(Crossing::A1B2);
    Matrix b = Bvv(v, v);
    EXPECT_EQ(b.get(8, 8), Scalar::q(2));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_EQ(b.get(i * 3 + j, i * 3 + j), b.get(j * 3 + i, j * 3 + i));
    Representation t = vector_rep_A(1);
    t.set_weights({QVec{0}, QVec{0}});
    EXPECT_EQ(Bvv(t, t), Matrix::identity(4));
    EXPECT_THROW(Bvv(vector_rep_A(1), vector_rep_A(2)), IncompatibleLattice);
}

TEST(Repcat, UniversalRThreeDimSl2) {
    Representation v = crossing_rep(Crossing::A1B2);
    EXPECT_EQ(universal_R(v, v), ref::sl2_three_dim_reference());
}

TEST(Repcat, UniversalRMatchesClosedForms) {
    for (int n = 1; n <= 3; ++n) {
        Representation v = vector_rep_A(n);
        EXPECT_EQ(universal_R(v, v).scaled(lambda_typeA(n + 1).inverse()), closed_R_typeA(n + 1)) << n;
    }
    for (auto [s, n] : std::vector<std::pair<char, int>>{{'B', 2}, {'C', 3}, {'D', 4}, {'B', 3}}) {
        SeriesCase sc(s, n);
        Representation v = vector_rep(sc);
        EXPECT_EQ(universal_R(v, v).scaled(Scalar::q(1)), closed_R_BCD(sc)) << sc.name();
    }
}

TEST(Repcat, ReducedWordIndependence) {
    Representation a2 = vector_rep_A(2);
    EXPECT_EQ(universal_R(a2, a2, {0, 1, 0}), universal_R(a2, a2, {1, 0, 1}));
    Representation a3 = vector_rep_A(3);
    Matrix r1 = universal_R(a3, a3, {0, 1, 0, 2, 1, 0});
    EXPECT_EQ(r1, universal_R(a3, a3, {2, 1, 2, 0, 1, 2}));
    EXPECT_EQ(r1, universal_R(a3, a3, {1, 0, 2, 1, 0, 2}));
    // also on a module with nontrivial divided powers
    Representation s = tensor_rep(a2, a2);
    EXPECT_EQ(universal_R(s, a2, {0, 1, 0}), universal_R(s, a2, {1, 0, 1}));
}

TEST(Repcat, CatalogCertificates) {
    for (auto [s, n] : std::vector<std::pair<char, int>>{{'A', 1}, {'A', 2}, {'A', 3}, {'B', 2}, {'C', 3}, {'D', 4}}) {
        RCertificate c = certify(rdata_series(SeriesCase(s, n)));
        EXPECT_TRUE(c.ok()) << s << n;
        EXPECT_EQ(c.qybe_Rprime, s == 'A') << s << n;
    }
    for (auto x : {Crossing::A1B2, Crossing::A2C3, Crossing::A3D4}) {
        RCertificate c = certify(rdata_crossing(x));
        EXPECT_TRUE(c.qybe_R && c.hecke && c.mixed && c.minpoly) << crossing_name(x);
    }
}

// The sl_4 six-dimensional module has P R_VV roots q, -q^-1, q^-5; {-q^-1, q^-1, q} does not annihilate it,
// and the R' built on those roots fails the Hecke condition.
TEST(Repcat, SixDimSl4Spectrum) {
    Representation v = crossing_rep(Crossing::A3D4);
    Matrix prvv = permutation_matrix(6) * universal_R(v, v);
    EXPECT_TRUE(annihilates(prvv, minpoly_roots_crossing(Crossing::A3D4)));
    EXPECT_FALSE(annihilates(prvv, minpoly_roots_crossing(Crossing::A3D4, true)));
    Matrix r = universal_R(v, v).scaled(crossing_scale(Crossing::A3D4));
    EXPECT_TRUE(hecke_pair_check(r, build_Rprime(r, RprimeFamily::A3D4)));
    EXPECT_FALSE(hecke_pair_check(r, build_Rprime(r, RprimeFamily::A3D4Alt)));
}
