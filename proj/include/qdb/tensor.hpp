#pragma once

#include "scalar.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdb {

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sparse matrix over Scalar; no explicit zeros are ever stored.
class Matrix {
public:
    using Row = std::map<int, Scalar>;

    Matrix() = default;
    Matrix(int r, int c) : rows_(r), cols_(c), data_(r) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m.data_[i].emplace(i, Scalar(1));
        return m;
    }
    static Matrix diagonal(const std::vector<Scalar>& d) {
        Matrix m((int)d.size(), (int)d.size());
        for (int i = 0; i < (int)d.size(); ++i) m.set(i, i, d[i]);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Row& row(int i) const { return data_[i]; }

    Scalar get(int i, int j) const {
        auto it = data_[i].find(j);
        return it == data_[i].end() ? Scalar() : it->second;
    }
    void set(int i, int j, Scalar v) {
        check(i, j);
        if (v.is_zero())
            data_[i].erase(j);
        else
            data_[i][j] = std::move(v);
    }
    void add_to(int i, int j, const Scalar& v) {
        check(i, j);
        auto it = data_[i].find(j);
        if (it == data_[i].end()) {
            if (!v.is_zero()) data_[i].emplace(j, v);
            return;
        }
        it->second += v;
        if (it->second.is_zero()) data_[i].erase(it);
    }

    std::size_t nnz() const {
        std::size_t n = 0;
        for (auto& r : data_) n += r.size();
        return n;
    }
    bool is_zero() const {
        for (auto& r : data_)
            if (!r.empty()) return false;
        return true;
    }
    bool is_diagonal() const {
        for (int i = 0; i < rows_; ++i)
            for (auto& [j, v] : data_[i])
                if (j != i) return false;
        return true;
    }

    template <class F>
    void for_each(F&& f) const {
        for (int i = 0; i < rows_; ++i)
            for (auto& [j, v] : data_[i]) f(i, j, v);
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        same_shape(a, b);
        Matrix r = a;
        b.for_each([&](int i, int j, const Scalar& v) { r.add_to(i, j, v); });
        return r;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        same_shape(a, b);
        Matrix r = a;
        b.for_each([&](int i, int j, const Scalar& v) { r.add_to(i, j, -v); });
        return r;
    }
    Matrix operator-() const { return scaled(Scalar(-1)); }
    Matrix scaled(const Scalar& s) const {
        Matrix r(rows_, cols_);
        if (s.is_zero()) return r;
        for_each([&](int i, int j, const Scalar& v) { r.set(i, j, v * s); });
        return r;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("matmul " + a.shape() + " x " + b.shape());
        Matrix r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i) {
            Row& acc = r.data_[i];
            for (auto& [k, x] : a.data_[i])
                for (auto& [j, y] : b.data_[k]) {
                    auto it = acc.find(j);
                    if (it == acc.end())
                        acc.emplace(j, x * y);
                    else
                        it->second += x * y;
                }
            for (auto it = acc.begin(); it != acc.end();)
                it = it->second.is_zero() ? acc.erase(it) : std::next(it);
        }
        return r;
    }
    Matrix& operator+=(const Matrix& o) { return *this = *this + o; }
    Matrix& operator-=(const Matrix& o) { return *this = *this - o; }
    Matrix& operator*=(const Matrix& o) { return *this = *this * o; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
        for (int i = 0; i < a.rows_; ++i) {
            if (a.data_[i].size() != b.data_[i].size()) return false;
            auto x = a.data_[i].begin();
            auto y = b.data_[i].begin();
            for (; x != a.data_[i].end(); ++x, ++y)
                if (x->first != y->first || x->second != y->second) return false;
        }
        return true;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    // first (row, col) where the two matrices differ, row-major
    friend std::optional<std::pair<int, int>> first_difference(const Matrix& a, const Matrix& b) {
        same_shape(a, b);
        for (int i = 0; i < a.rows_; ++i) {
            auto x = a.data_[i].begin();
            auto y = b.data_[i].begin();
            while (x != a.data_[i].end() || y != b.data_[i].end()) {
                if (y == b.data_[i].end() || (x != a.data_[i].end() && x->first < y->first)) return std::pair{i, x->first};
                if (x == a.data_[i].end() || y->first < x->first) return std::pair{i, y->first};
                if (x->second != y->second) return std::pair{i, x->first};
                ++x, ++y;
            }
        }
        return std::nullopt;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for_each([&](int i, int j, const Scalar& v) { r.data_[j].emplace(i, v); });
        return r;
    }

    Matrix pow(int k) const {
        Matrix r = identity(rows_);
        for (int t = 0; t < k; ++t) r = r * *this;
        return r;
    }

    long root_order() const {
        long l = 1;
        for_each([&](int, int, const Scalar& v) { l = std::lcm(l, v.root_order()); });
        return l;
    }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
    void check(int i, int j) const {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw DimensionMismatch("index out of range");
    }
    static void same_shape(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch(a.shape() + " vs " + b.shape());
    }

    int rows_ = 0, cols_ = 0;
    std::vector<Row> data_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
    a.for_each([&](int i, int j, const Scalar& x) {
        b.for_each([&](int k, int l, const Scalar& y) { r.set(i * b.rows() + k, j * b.cols() + l, x * y); });
    });
    return r;
}

// P^{ij}_{kl} = delta_il delta_jk, row (i,j) col (k,l)
inline Matrix permutation_matrix(int n) {
    Matrix p(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p.set(i * n + j, j * n + i, Scalar(1));
    return p;
}

// dimension of V for a matrix on V (x) V
inline int tensor_root(const Matrix& r) {
    if (r.rows() != r.cols()) throw DimensionMismatch("not square: " + r.shape());
    int n = 0;
    while (n * n < r.rows()) ++n;
    if (n * n != r.rows()) throw DimensionMismatch("dimension is not a perfect square: " + r.shape());
    return n;
}

enum class Legs { L12, L13, L23 };

inline Matrix leg_embed(const Matrix& r, int n, Legs legs) {
    if (r.rows() != n * n || r.cols() != n * n) throw DimensionMismatch("leg_embed expects n^2 x n^2");
    Matrix id = Matrix::identity(n);
    switch (legs) {
        case Legs::L12: return kron(r, id);
        case Legs::L23: return kron(id, r);
        case Legs::L13: {
            Matrix sw = kron(id, permutation_matrix(n));
            return sw * kron(r, id) * sw;
        }
    }
    return {};
}

inline bool qybe_holds(const Matrix& r) {
    int n = tensor_root(r);
    Matrix r12 = leg_embed(r, n, Legs::L12), r13 = leg_embed(r, n, Legs::L13), r23 = leg_embed(r, n, Legs::L23);
    return r12 * r13 * r23 == r23 * r13 * r12;
}

// prod_t (M - mu_t I) == 0
inline bool annihilates(const Matrix& m, const std::vector<Scalar>& roots) {
    if (m.rows() != m.cols()) throw DimensionMismatch("annihilates expects a square matrix");
    Matrix acc = Matrix::identity(m.rows());
    Matrix id = Matrix::identity(m.rows());
    for (auto& mu : roots) acc = acc * (m - id.scaled(mu));
    return acc.is_zero();
}

// (PR + I)(PR' - I) == 0
inline bool hecke_pair_check(const Matrix& r, const Matrix& rp) {
    int n = tensor_root(r);
    if (rp.rows() != r.rows()) throw DimensionMismatch("R and R' differ in size");
    Matrix p = permutation_matrix(n), id = Matrix::identity(n * n);
    return ((p * r + id) * (p * rp - id)).is_zero();
}

// conditions (i) and (iii) for a pair (R, R')
inline bool mixed_qybe_check(const Matrix& r, const Matrix& rp) {
    int n = tensor_root(r);
    if (rp.rows() != r.rows()) throw DimensionMismatch("R and R' differ in size");
    Matrix r12 = leg_embed(r, n, Legs::L12), r13 = leg_embed(r, n, Legs::L13), r23 = leg_embed(r, n, Legs::L23);
    Matrix s12 = leg_embed(rp, n, Legs::L12), s23 = leg_embed(rp, n, Legs::L23);
    if (r12 * r13 * s23 != s23 * r13 * r12) return false;
    if (r23 * r13 * s12 != s12 * r13 * r23) return false;
    Matrix p = permutation_matrix(n);
    Matrix r21 = p * r * p, rp21 = p * rp * p;
    return r21 * rp == rp21 * r;
}

// ---- dump format: "rows cols root_order" then "row col scalar" row-major ----

inline std::string dump_matrix(const Matrix& m) {
    std::ostringstream os;
    os << m.rows() << ' ' << m.cols() << ' ' << m.root_order() << '\n';
    m.for_each([&](int i, int j, const Scalar& v) { os << i << ' ' << j << ' ' << v.str() << '\n'; });
    return os.str();
}

inline Matrix parse_matrix(const std::string& text, std::shared_ptr<const Laurent> modulus = nullptr) {
    std::istringstream is(text);
    int r, c;
    long L;
    if (!(is >> r >> c >> L)) throw ParseError("bad matrix header");
    Matrix m(r, c);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        if (detail::trim(line).empty()) continue;
        std::istringstream ls(line);
        int i, j;
        if (!(ls >> i >> j)) throw ParseError("bad matrix entry: " + line);
        std::string rest;
        std::getline(ls, rest);
        m.set(i, j, parse_scalar(rest, modulus));
    }
    return m;
}

}  // namespace qdb
