#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdb {

struct NonInvertibleScalar : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModulusMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// rational exponent helper
inline mpq_class mkq(long n, long d = 1) {
    mpq_class r(n, d);
    r.canonicalize();
    return r;
}

// Sum of c_k q^{k/L}, rational c_k.
class Laurent {
public:
    using Term = std::pair<long, mpq_class>;

    Laurent() = default;
    Laurent(long c) { if (c) t_.emplace_back(0, mpq_class(c)); }
    Laurent(const mpq_class& c) { if (sgn(c)) t_.emplace_back(0, c); }

    // c * q^e
    static Laurent mono(const mpq_class& e, const mpq_class& c = 1) {
        Laurent r;
        if (sgn(c) == 0) return r;
        r.L_ = e.get_den().get_si();
        r.t_.emplace_back(e.get_num().get_si(), c);
        return r;
    }
    static Laurent q(const mpq_class& e) { return mono(e, 1); }

    long root_order() const { return L_; }
    const std::vector<Term>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_monomial() const { return t_.size() == 1; }
    std::size_t size() const { return t_.size(); }

    mpq_class exponent(std::size_t i) const { return mkq(t_[i].first, L_); }
    const mpq_class& coeff(std::size_t i) const { return t_[i].second; }
    mpq_class min_exp() const { return exponent(0); }
    mpq_class max_exp() const { return exponent(t_.size() - 1); }

    // constant term when the scalar is a pure rational
    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].first == 0); }
    mpq_class constant() const { return t_.empty() ? mpq_class(0) : t_[0].second; }

    Laurent rescaled(long factor) const {
        Laurent r;
        r.L_ = L_ * factor;
        r.t_.reserve(t_.size());
        for (auto& [k, c] : t_) r.t_.emplace_back(k * factor, c);
        return r;
    }

    // canonical form: root order reduced by the gcd of the exponents (rescaled() output is not canonical)
    Laurent normalized() const {
        Laurent r = *this;
        r.normalize();
        return r;
    }

    friend Laurent operator+(const Laurent& a, const Laurent& b) {
        if (a.t_.empty()) return b;
        if (b.t_.empty()) return a;
        if (a.L_ != b.L_) {
            long l = std::lcm(a.L_, b.L_);
            return a.rescaled(l / a.L_) + b.rescaled(l / b.L_);
        }
        Laurent r;
        r.L_ = a.L_;
        r.t_.reserve(a.t_.size() + b.t_.size());
        std::size_t i = 0, j = 0;
        while (i < a.t_.size() || j < b.t_.size()) {
            if (j == b.t_.size() || (i < a.t_.size() && a.t_[i].first < b.t_[j].first)) {
                r.t_.push_back(a.t_[i++]);
            } else if (i == a.t_.size() || b.t_[j].first < a.t_[i].first) {
                r.t_.push_back(b.t_[j++]);
            } else {
                mpq_class c = a.t_[i].second + b.t_[j].second;
                if (sgn(c)) r.t_.emplace_back(a.t_[i].first, std::move(c));
                ++i, ++j;
            }
        }
        r.normalize();
        return r;
    }
    Laurent operator-() const {
        Laurent r = *this;
        for (auto& kv : r.t_) kv.second = -kv.second;
        return r;
    }
    friend Laurent operator-(const Laurent& a, const Laurent& b) { return a + (-b); }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        if (a.t_.empty() || b.t_.empty()) return {};
        if (a.L_ != b.L_) {
            long l = std::lcm(a.L_, b.L_);
            return a.rescaled(l / a.L_) * b.rescaled(l / b.L_);
        }
        Laurent r;
        r.L_ = a.L_;
        if (a.t_.size() == 1 || b.t_.size() == 1) {
            const Laurent& m = a.t_.size() == 1 ? a : b;
            const Laurent& o = a.t_.size() == 1 ? b : a;
            r.t_.reserve(o.t_.size());
            for (auto& [k, c] : o.t_) r.t_.emplace_back(k + m.t_[0].first, c * m.t_[0].second);
            r.normalize();
            return r;
        }
        std::vector<Term> acc;
        acc.reserve(a.t_.size() * b.t_.size());
        for (auto& [k1, c1] : a.t_)
            for (auto& [k2, c2] : b.t_) acc.emplace_back(k1 + k2, c1 * c2);
        std::sort(acc.begin(), acc.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
        for (auto& kv : acc) {
            if (!r.t_.empty() && r.t_.back().first == kv.first)
                r.t_.back().second += kv.second;
            else {
                if (!r.t_.empty() && sgn(r.t_.back().second) == 0) r.t_.pop_back();
                r.t_.push_back(std::move(kv));
            }
        }
        if (!r.t_.empty() && sgn(r.t_.back().second) == 0) r.t_.pop_back();
        r.normalize();
        return r;
    }
    Laurent& operator+=(const Laurent& o) { return *this = *this + o; }
    Laurent& operator-=(const Laurent& o) { return *this = *this - o; }
    Laurent& operator*=(const Laurent& o) { return *this = *this * o; }

    friend bool operator==(const Laurent& a, const Laurent& b) { return a.L_ == b.L_ && a.t_ == b.t_; }
    friend bool operator!=(const Laurent& a, const Laurent& b) { return !(a == b); }

    Laurent inverse() const {
        if (t_.size() != 1) throw NonInvertibleScalar("inverse of non-monomial Laurent scalar");
        Laurent r;
        r.L_ = L_;
        r.t_.emplace_back(-t_[0].first, 1 / t_[0].second);
        r.normalize();
        return r;
    }

    // exact division by b; throws if b does not divide this
    Laurent divexact(const Laurent& b) const {
        if (b.is_zero()) throw NonInvertibleScalar("division by zero");
        if (is_zero()) return {};
        if (b.is_monomial()) return *this * b.inverse();
        long l = std::lcm(L_, b.L_);
        Laurent num = rescaled(l / L_), den = b.rescaled(l / b.L_);
        // long division from the top exponent down
        std::vector<Term> rem = num.t_;
        const auto& dt = den.t_;
        long dtop = dt.back().first, dlow = dt.front().first;
        long lowq = rem.front().first - dlow;
        std::vector<Term> quo;
        while (!rem.empty()) {
            long e = rem.back().first - dtop;
            if (e < lowq) throw NonInvertibleScalar("not divisible");
            mpq_class c = rem.back().second / dt.back().second;
            quo.emplace_back(e, c);
            Laurent sub;
            sub.L_ = l;
            for (auto& [k, v] : dt) sub.t_.emplace_back(k + e, v * c);
            Laurent cur;
            cur.L_ = l;
            cur.t_ = std::move(rem);
            Laurent nx = cur - sub;
            if (nx.L_ != l) nx = nx.rescaled(l / nx.L_);
            rem = std::move(nx.t_);
        }
        Laurent r;
        r.L_ = l;
        std::reverse(quo.begin(), quo.end());
        r.t_ = std::move(quo);
        r.normalize();
        return r;
    }

    // textual form "c*q^(e)" joined by " + "
    std::string str() const {
        if (t_.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < t_.size(); ++i) {
            if (i) s += " + ";
            s += t_[i].second.get_str();
            s += "*q^(";
            s += mkq(t_[i].first, L_).get_str();
            s += ")";
        }
        return s;
    }

    friend bool operator<(const Laurent& a, const Laurent& b) {
        // total order for use as map key: by L then terms
        if (a.L_ != b.L_) return a.L_ < b.L_;
        if (a.t_.size() != b.t_.size()) return a.t_.size() < b.t_.size();
        for (std::size_t i = 0; i < a.t_.size(); ++i) {
            if (a.t_[i].first != b.t_[i].first) return a.t_[i].first < b.t_[i].first;
            if (a.t_[i].second != b.t_[i].second) return a.t_[i].second < b.t_[i].second;
        }
        return false;
    }

private:
    void normalize() {
        if (t_.empty()) { L_ = 1; return; }
        long g = L_;
        for (auto& kv : t_) {
            g = std::gcd(g, kv.first);
            if (g == 1) return;
        }
        if (g <= 1) return;
        L_ /= g;
        for (auto& kv : t_) kv.first /= g;
    }

    long L_ = 1;
    std::vector<Term> t_;
};

// a + b*s with s^2 = m. m is shared by all scalars of one arithmetic context.
class Scalar {
public:
    Scalar() = default;
    Scalar(long c) : a_(c) {}
    Scalar(const mpq_class& c) : a_(c) {}
    Scalar(Laurent a) : a_(std::move(a)) {}
    Scalar(Laurent a, Laurent b, std::shared_ptr<const Laurent> m) : a_(std::move(a)), b_(std::move(b)), m_(std::move(m)) {
        if (!b_.is_zero() && !m_) throw ModulusMismatch("radical part without modulus");
    }

    static Scalar q(const mpq_class& e, const mpq_class& c = 1) { return Scalar(Laurent::mono(e, c)); }
    static Scalar radical(std::shared_ptr<const Laurent> m) { return Scalar(Laurent(), Laurent(1), std::move(m)); }

    const Laurent& base() const { return a_; }
    const Laurent& rad() const { return b_; }
    const std::shared_ptr<const Laurent>& modulus() const { return m_; }
    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
    bool is_extended() const { return !b_.is_zero(); }
    bool is_monomial() const { return b_.is_zero() && a_.is_monomial(); }

    friend Scalar operator+(const Scalar& x, const Scalar& y) {
        return Scalar(x.a_ + y.a_, x.b_ + y.b_, pick(x, y));
    }
    friend Scalar operator-(const Scalar& x, const Scalar& y) {
        return Scalar(x.a_ - y.a_, x.b_ - y.b_, pick(x, y));
    }
    Scalar operator-() const { return Scalar(-a_, -b_, m_); }
    friend Scalar operator*(const Scalar& x, const Scalar& y) {
        if (x.b_.is_zero() && y.b_.is_zero()) {
            Scalar r(x.a_ * y.a_);
            r.m_ = x.m_ ? x.m_ : y.m_;
            return r;
        }
        auto m = pick(x, y);
        Laurent a = x.a_ * y.a_;
        if (!x.b_.is_zero() && !y.b_.is_zero()) a += x.b_ * y.b_ * *m;
        Laurent b = x.a_ * y.b_ + x.b_ * y.a_;
        return Scalar(std::move(a), std::move(b), std::move(m));
    }
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    friend bool operator==(const Scalar& x, const Scalar& y) {
        if (!x.b_.is_zero() || !y.b_.is_zero()) pick(x, y);
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const Scalar& x, const Scalar& y) { return !(x == y); }

    Scalar inverse() const {
        if (!b_.is_zero()) throw NonInvertibleScalar("inverse of extended scalar");
        Scalar r(a_.inverse());
        r.m_ = m_;
        return r;
    }

    // exact division; divisor may be Laurent, or a pure radical b*s
    Scalar divexact(const Scalar& d) const {
        if (d.b_.is_zero()) {
            Scalar r(a_.divexact(d.a_), b_.is_zero() ? Laurent() : b_.divexact(d.a_), m_ ? m_ : d.m_);
            return r;
        }
        if (!d.a_.is_zero()) throw NonInvertibleScalar("division by mixed extended scalar");
        // x / (b s) = x s / (b m)
        auto m = pick(*this, d);
        Scalar xs = *this * Scalar(Laurent(), Laurent(1), m);
        return xs.divexact(Scalar(d.b_ * *m));
    }

    std::string str() const {
        if (b_.is_zero()) return a_.str();
        std::string s;
        if (!a_.is_zero()) s = a_.str() + " + ";
        s += "(" + b_.str() + ")*s";
        return s;
    }

    long root_order() const { return std::lcm(a_.root_order(), b_.root_order()); }

private:
    static std::shared_ptr<const Laurent> pick(const Scalar& x, const Scalar& y) {
        if (x.m_ && y.m_ && x.m_ != y.m_ && *x.m_ != *y.m_) throw ModulusMismatch("scalars from different extensions");
        return x.m_ ? x.m_ : y.m_;
    }

    Laurent a_, b_;
    std::shared_ptr<const Laurent> m_;
};

inline std::ostream& operator<<(std::ostream& os, const Laurent& x) { return os << x.str(); }
inline std::ostream& operator<<(std::ostream& os, const Scalar& x) { return os << x.str(); }

// the modulus used for type B: s^2 = q^{1/2} + q^{-1/2}
inline std::shared_ptr<const Laurent> type_b_modulus() {
    static auto m = std::make_shared<const Laurent>(Laurent::q(mkq(1, 2)) + Laurent::q(mkq(-1, 2)));
    return m;
}

// ---- q-combinatorics ----

// [n]_{q^d}
inline Laurent q_integer(long n, const mpq_class& d = 1) {
    Laurent r;
    for (long k = 0; k < n; ++k) r += Laurent::q(d * (n - 1 - 2 * k));
    return r;
}
inline Laurent q_factorial(long n, const mpq_class& d = 1) {
    Laurent r(1);
    for (long k = 1; k <= n; ++k) r *= q_integer(k, d);
    return r;
}
inline Laurent q_binomial(long n, long k, const mpq_class& d = 1) {
    if (k < 0 || k > n) return {};
    return q_factorial(n, d).divexact(q_factorial(k, d) * q_factorial(n - k, d));
}

// ---- parsing of the textual form ----

namespace detail {
inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}
inline mpq_class parse_q(const std::string& s) {
    try {
        mpq_class r(trim(s));
        r.canonicalize();
        return r;
    } catch (const std::exception&) {
        throw ParseError("bad rational: " + s);
    }
}
}  // namespace detail

inline Laurent parse_laurent(const std::string& text) {
    std::string s = detail::trim(text);
    if (s == "0" || s.empty()) return {};
    Laurent r;
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto next = s.find(" + ", pos);
        std::string term = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        auto star = term.find("*q^(");
        if (star == std::string::npos || term.back() != ')') throw ParseError("bad term: " + term);
        mpq_class c = detail::parse_q(term.substr(0, star));
        mpq_class e = detail::parse_q(term.substr(star + 4, term.size() - star - 5));
        r += Laurent::mono(e, c);
        if (next == std::string::npos) break;
        pos = next + 3;
    }
    return r;
}

inline Scalar parse_scalar(const std::string& text, std::shared_ptr<const Laurent> modulus = nullptr) {
    // "A", "(B)*s" or "A + (B)*s"; Laurent terms never start with "(", so " + (" marks the radical part
    std::string s = detail::trim(text);
    if (s.size() < 4 || s.compare(s.size() - 3, 3, ")*s") != 0) return Scalar(parse_laurent(s));
    Laurent a, b;
    auto split = s.rfind(" + (");
    if (split == std::string::npos) {
        if (s[0] != '(') throw ParseError("bad extended scalar: " + s);
        b = parse_laurent(s.substr(1, s.size() - 4));
    } else {
        a = parse_laurent(s.substr(0, split));
        b = parse_laurent(s.substr(split + 4, s.size() - split - 7));
    }
    if (!modulus) modulus = type_b_modulus();
    return Scalar(std::move(a), std::move(b), std::move(modulus));
}

}  // namespace qdb
