#pragma once

#include "tensor.hpp"

#include <string>
#include <vector>

namespace qdb {

struct RankOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownCase : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Crossing { A1B2, A2C3, A3D4 };

inline std::string crossing_name(Crossing c) {
    switch (c) {
        case Crossing::A1B2: return "A1B2";
        case Crossing::A2C3: return "A2C3";
        case Crossing::A3D4: return "A3D4";
    }
    return "";
}
inline Crossing parse_crossing(const std::string& s) {
    if (s == "A1B2") return Crossing::A1B2;
    if (s == "A2C3") return Crossing::A2C3;
    if (s == "A3D4") return Crossing::A3D4;
    throw UnknownCase("unknown crossing tag: " + s);
}

// Classical series with Cartan rank n. For A the vector dimension is n+1.
struct SeriesCase {
    char series = 'A';
    int n = 1;

    SeriesCase() = default;
    SeriesCase(char s, int rank) : series(s), n(rank) {
        int lo = s == 'A' ? 1 : s == 'B' ? 2 : s == 'C' ? 3 : s == 'D' ? 4 : -1;
        if (lo < 0) throw UnknownCase(std::string("unknown series ") + s);
        if (rank < lo) throw RankOutOfRange(std::string(1, s) + std::to_string(rank));
    }

    int N() const { return series == 'A' ? n + 1 : series == 'B' ? 2 * n + 1 : 2 * n; }
    int eps() const { return series == 'C' ? -1 : 1; }
    // 1-based index helpers
    int conj(int i) const { return N() + 1 - i; }
    int eps_i(int i) const { return (series == 'C' && i > n) ? -1 : 1; }
    mpq_class rho(int i) const {
        int ip = conj(i);
        if (i == ip) return 0;
        int lo = std::min(i, ip);
        mpq_class r = series == 'C' ? mpq_class(mkq(N(), 2) + 1 - lo) : mpq_class(mkq(N(), 2) - lo);
        r.canonicalize();
        return i < ip ? r : mpq_class(-r);
    }
    std::string name() const { return std::string(1, series) + std::to_string(n); }
};

inline int theta(long k) { return k > 0 ? 1 : 0; }

// Closed-form type-A R on the n-dim vector module: R^{ij}_{kl}, row (i,j), col (k,l)
inline Matrix closed_R_typeA(int n) {
    if (n < 1) throw RankOutOfRange("type A needs n >= 1");
    Matrix r(n * n, n * n);
    Scalar q2m1 = Scalar::q(2) - Scalar(1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            r.set(i * n + j, i * n + j, Scalar::q(i == j ? 2 : 1));
            if (theta(j - i)) r.set(i * n + j, j * n + i, q2m1);
        }
    return r;
}

// Closed-form BCD R, theta(j-l) on both the swap and the K term
inline Matrix closed_R_BCD(const SeriesCase& c) {
    if (c.series == 'A') throw UnknownCase("closed_R_BCD needs series B, C or D");
    const int N = c.N();
    Matrix r(N * N, N * N);
    Scalar q2m1 = Scalar::q(2) - Scalar(1);
    for (int i = 1; i <= N; ++i)
        for (int j = 1; j <= N; ++j)
            for (int k = 1; k <= N; ++k)
                for (int l = 1; l <= N; ++l) {
                    Scalar v;
                    if (i == k && j == l) v += Scalar::q(1 + (j == i) - (j == c.conj(i)));
                    if (theta(j - l)) {
                        if (i == l && j == k) v += q2m1;
                        // K^{ij}_{lk} = eps C^i_j C^l_k, C^m_t = eps_m delta_{m t'} q^{-rho_m}
                        if (j == c.conj(i) && k == c.conj(l)) {
                            Scalar kv = Scalar::q(-c.rho(i) - c.rho(l), c.eps() * c.eps_i(i) * c.eps_i(l));
                            v -= q2m1 * kv;
                        }
                    }
                    if (!v.is_zero()) r.set((i - 1) * N + (j - 1), (k - 1) * N + (l - 1), v);
                }
    return r;
}

// R' families
enum class RprimeFamily { TypeA, BCD, A1B2, A2C3, A3D4, A3D4Alt };

inline Matrix build_Rprime(const Matrix& r, RprimeFamily fam, const SeriesCase& c = {}) {
    int n = tensor_root(r);
    Matrix p = permutation_matrix(n);
    auto qs = [](long e) { return Scalar::q(e); };
    switch (fam) {
        case RprimeFamily::TypeA: return r.scaled(Scalar::q(-2));
        case RprimeFamily::BCD: {
            int N = c.N(), e = c.eps();
            Scalar a = Scalar::q(e - N + 1, e) + qs(2);
            Scalar b = Scalar::q(e - N + 3, e) + Scalar(1);
            return r * p * r - r.scaled(a) + p.scaled(b);
        }
        case RprimeFamily::A1B2: return r * p * r - r.scaled(qs(-2) + qs(4)) + p.scaled(qs(2) + Scalar(1));
        case RprimeFamily::A2C3: return r * p * r - r.scaled(qs(-2) + qs(4)) + p.scaled(qs(2) + Scalar(1));
        // P R_VV on the 6-dim sl_4 rep has eigenvalues q, -q^-1, q^-5 (the so_6 vector pattern), so with
        // R = q R_VV the Hecke companion is the D_3 form. A3D4Alt is built on roots {-q^-1, q^-1, q} and fails
        // the Hecke check.
        case RprimeFamily::A3D4: return r * p * r - r.scaled(qs(2) + qs(-4)) + p.scaled(qs(-2) + Scalar(1));
        case RprimeFamily::A3D4Alt: return r * p * r - r.scaled(qs(2) + Scalar(1)) + p.scaled(qs(2) + Scalar(1));
    }
    return {};
}

// normalization constants
inline Scalar lambda_typeA(int dim) { return Scalar::q(mkq(-(dim + 1), dim)); }
inline Scalar lambda_BCD() { return Scalar::q(-1); }
inline Scalar lambda_crossing(Crossing c) {
    switch (c) {
        case Crossing::A1B2: return Scalar::q(-2);
        case Crossing::A2C3: return Scalar::q(mkq(-4, 3));
        case Crossing::A3D4: return Scalar::q(-1);
    }
    return {};
}

// (P R P)^{ij}_{kl} = R^{ji}_{lk}
inline Matrix majid_flip(const Matrix& r) {
    int n = tensor_root(r);
    Matrix p = permutation_matrix(n);
    return p * r * p;
}

// Exact inverse of a matrix D(I + N) with D diagonal monomial and N nilpotent,
// which covers every R built here (they are triangular for a suitable order of index pairs).
inline Matrix unipotent_inverse(const Matrix& r) {
    int n = r.rows();
    std::vector<Scalar> dinv(n);
    for (int i = 0; i < n; ++i) {
        Scalar d = r.get(i, i);
        if (!d.is_monomial()) throw NonInvertibleScalar("diagonal entry is not a monomial");
        dinv[i] = d.inverse();
    }
    Matrix di = Matrix::diagonal(dinv);
    Matrix nil = di * r - Matrix::identity(n);
    Matrix acc = Matrix::identity(n), term = Matrix::identity(n);
    Matrix neg = -nil;
    for (int k = 1; k <= n; ++k) {
        term = term * neg;
        if (term.is_zero()) break;
        acc += term;
    }
    if (!term.is_zero()) throw NonInvertibleScalar("off-diagonal part is not nilpotent");
    Matrix inv = acc * di;
    if (inv * r != Matrix::identity(n)) throw NonInvertibleScalar("inverse check failed");
    return inv;
}

// R_21^{-1} = P R^{-1} P
inline Matrix r21_inverse(const Matrix& r) { return majid_flip(unipotent_inverse(r)); }

}  // namespace qdb
