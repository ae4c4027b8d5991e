#pragma once

// Double-bosonization presentation, case catalog and verification by evaluation in target representations.

#include "frt.hpp"
#include "rmatrix.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace qdb {

struct ExtractionStuck : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PairConditionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------- presentation ----------------

// Roster generator: e^i, f_i, c, c^-1, (m+)^i_j, (m-)^i_j. Indices 0-based.
struct Gen {
    char kind = 'e';  // 'e' 'f' 'c' 'i' (c^-1) '+' '-'
    int i = 0, j = 0;
    auto operator<=>(const Gen&) const = default;

    std::string str() const {
        auto s = [](int k) { return std::to_string(k + 1); };
        switch (kind) {
            case 'e': return "e^" + s(i);
            case 'f': return "f_" + s(i);
            case 'c': return "c";
            case 'i': return "c^-1";
            case '+': return "m+^" + s(i) + "_" + s(j);
            case '-': return "m-^" + s(i) + "_" + s(j);
        }
        return "?";
    }
    static Gen parse(const std::string& t) {
        auto num = [&](std::size_t a, std::size_t b) { return std::stoi(t.substr(a, b - a)) - 1; };
        if (t == "c") return {'c'};
        if (t == "c^-1") return {'i'};
        if (t.size() > 2 && t[0] == 'e' && t[1] == '^') return {'e', num(2, t.size())};
        if (t.size() > 2 && t[0] == 'f' && t[1] == '_') return {'f', num(2, t.size())};
        if (t.size() > 4 && t[0] == 'm' && (t[1] == '+' || t[1] == '-') && t[2] == '^') {
            auto u = t.find('_');
            if (u != std::string::npos) return {t[1], num(3, u), num(u + 1, t.size())};
        }
        throw ParseError("unknown roster generator: " + t);
    }
};

struct Monomial {
    Scalar coef;
    std::vector<Gen> word;
};

struct Relation {
    std::string family;
    std::vector<int> indices;  // 1-based
    std::vector<Monomial> lhs, rhs;

    template <class P>
    bool only(P&& allowed) const {
        for (auto* side : {&lhs, &rhs})
            for (auto& t : *side)
                for (auto& g : t.word)
                    if (!allowed(g)) return false;
        return true;
    }
    bool mentions(const Gen& g) const {
        return !only([&](const Gen& x) { return x != g; });
    }
    std::string str() const {
        auto side = [](const std::vector<Monomial>& ts) {
            if (ts.empty()) return std::string("0");
            std::string out;
            for (auto& t : ts) {
                if (!out.empty()) out += " + ";
                out += "[" + t.coef.str() + "]";
                for (auto& g : t.word) out += " " + g.str();
            }
            return out;
        };
        return side(lhs) + " = " + side(rhs);
    }
};

struct Presentation {
    int dim = 0;
    Scalar lambda, qstar;
    std::vector<Relation> relations;

    static long expected_count(long d) { return 3 * d * d * d * d + 4 * d * d * d + 5 * d * d + 2 * d; }
};

// m+ is upper and m- lower triangular; entries on the wrong side are zero and their terms are dropped.
inline bool structurally_zero(const Gen& g) { return (g.kind == '+' && g.i > g.j) || (g.kind == '-' && g.i < g.j); }

// R entries in the layout R^{ik}_{jl} at row (i,k), col (j,l).
// ef_delta = true keeps a delta_ij on the [e^i, f_j] relation; the default is the undeltaed form, whose
// off-diagonal instances carry the non-simple root vector content (they hold in every catalog case).
inline Presentation build_presentation(const Matrix& R, const Matrix& Rp, const Scalar& lambda, int d, const Scalar& qstar,
                                       bool ef_delta = false) {
    if (tensor_root(R) != d || tensor_root(Rp) != d) throw DimensionMismatch("R, R' do not act on V(x)V");
    if (!hecke_pair_check(R, Rp)) throw PairConditionViolated("(PR+I)(PR'-I) != 0");
    if (!mixed_qybe_check(R, Rp)) throw PairConditionViolated("mixed QYBE conditions fail");
    Presentation p;
    p.dim = d;
    p.lambda = lambda;
    p.qstar = qstar;
    const Matrix lR = R.scaled(lambda);
    auto at = [d](const Matrix& m, int i, int k, int j, int l) { return m.get(i * d + k, j * d + l); };
    auto term = [](Scalar c, std::vector<Gen> w) -> std::optional<Monomial> {
        if (c.is_zero()) return std::nullopt;
        for (auto& g : w)
            if (structurally_zero(g)) return std::nullopt;
        return Monomial{std::move(c), std::move(w)};
    };
    auto push = [](std::vector<Monomial>& side, std::optional<Monomial> t) {
        if (t) side.push_back(std::move(*t));
    };
    auto e = [](int i) { return Gen{'e', i}; };
    auto f = [](int i) { return Gen{'f', i}; };
    auto mp = [](int i, int j) { return Gen{'+', i, j}; };
    auto mm = [](int i, int j) { return Gen{'-', i, j}; };
    const Gen c{'c'}, ci{'i'};
    auto rel = [&](std::string fam, std::vector<int> idx) {
        Relation r;
        r.family = std::move(fam);
        for (int x : idx) r.indices.push_back(x + 1);
        return r;
    };

    // braided vector relations
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Relation r = rel("ee", {i, j});
            push(r.lhs, term(Scalar(1), {e(i), e(j)}));
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) push(r.rhs, term(at(Rp, j, i, a, b), {e(a), e(b)}));
            p.relations.push_back(std::move(r));
        }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Relation r = rel("ff", {i, j});
            push(r.lhs, term(Scalar(1), {f(i), f(j)}));
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) push(r.rhs, term(at(Rp, a, b, i, j), {f(b), f(a)}));
            p.relations.push_back(std::move(r));
        }
    // cross relations
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                Relation r = rel("e.m+", {i, j, k});
                push(r.lhs, term(Scalar(1), {e(i), mp(j, k)}));
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) push(r.rhs, term(at(lR, j, i, a, b), {mp(a, k), e(b)}));
                p.relations.push_back(std::move(r));
            }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                Relation r = rel("m-.e", {i, j, k});
                push(r.lhs, term(Scalar(1), {mm(i, j), e(k)}));
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) push(r.rhs, term(at(lR, k, i, a, b), {e(a), mm(b, j)}));
                p.relations.push_back(std::move(r));
            }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                Relation r = rel("m+.f", {i, j, k});
                push(r.lhs, term(Scalar(1), {mp(i, j), f(k)}));
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) push(r.rhs, term(at(lR, a, b, j, k), {f(b), mp(i, a)}));
                p.relations.push_back(std::move(r));
            }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                Relation r = rel("f.m-", {i, j, k});
                push(r.lhs, term(Scalar(1), {f(i), mm(j, k)}));
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) push(r.rhs, term(at(lR, a, b, i, k), {mm(j, b), f(a)}));
                p.relations.push_back(std::move(r));
            }
    // c relations
    for (int i = 0; i < d; ++i) {
        Relation r = rel("cf", {i});
        push(r.lhs, term(Scalar(1), {c, f(i)}));
        push(r.rhs, term(lambda, {f(i), c}));
        p.relations.push_back(std::move(r));
    }
    for (int i = 0; i < d; ++i) {
        Relation r = rel("ec", {i});
        push(r.lhs, term(Scalar(1), {e(i), c}));
        push(r.rhs, term(lambda, {c, e(i)}));
        p.relations.push_back(std::move(r));
    }
    for (char s : {'+', '-'})
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Relation r = rel(std::string("cm") + s, {i, j});
                Gen m{s, i, j};
                push(r.lhs, term(Scalar(1), {c, m}));
                push(r.rhs, term(Scalar(1), {m, c}));
                p.relations.push_back(std::move(r));
            }
    // [e^i, f_j] (q* - q*^-1) = m+^i_j c^-1 - c m-^i_j
    Scalar qq = qstar - qstar.inverse();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Relation r = rel("ef", {i, j});
            push(r.lhs, term(qq, {e(i), f(j)}));
            push(r.lhs, term(-qq, {f(j), e(i)}));
            if (i == j || !ef_delta) {
                push(r.rhs, term(Scalar(1), {mp(i, j), ci}));
                push(r.rhs, term(Scalar(-1), {c, mm(i, j)}));
            }
            p.relations.push_back(std::move(r));
        }
    // (C4): sum R^{ik}_{ab} A^a_j B^b_l = sum B^k_b A^i_a R^{ab}_{jl}
    for (auto [sa, sb] : {std::pair{'+', '+'}, std::pair{'-', '-'}, std::pair{'+', '-'}})
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                for (int j = 0; j < d; ++j)
                    for (int l = 0; l < d; ++l) {
                        Relation r = rel(std::string("rtt") + sa + sb, {i, k, j, l});
                        for (int a = 0; a < d; ++a)
                            for (int b = 0; b < d; ++b) {
                                push(r.lhs, term(at(R, i, k, a, b), {Gen{sa, a, j}, Gen{sb, b, l}}));
                                push(r.rhs, term(at(R, a, b, j, l), {Gen{sb, k, b}, Gen{sa, i, a}}));
                            }
                        p.relations.push_back(std::move(r));
                    }
    return p;
}

// ---------------- case catalog ----------------

struct CaseMap {
    std::string name;  // "A2-A3", "A1-B2"
    std::string base;  // "A2", "A1B2"
    Representation V;  // base vector rep
    Matrix R, Rprime;
    Scalar lambda, qstar;
    CartanData target;
    std::vector<Representation> targets;  // target reps, vector rep first
    int new_node = 0;
    FRTTable table;
    int table_f_sign = -1;
    // identification, as expressions over the target's letters
    QGExpression e_top, f_top, k_new;
    std::vector<std::string> notes;

    int dim() const { return V.dim; }
    int top() const { return V.dim - 1; }
};

inline CaseMap make_series_case(char s, int n) {
    CaseMap c;
    SeriesCase base(s, n), tgt(s, n + 1);
    c.base = base.name();
    c.name = base.name() + "-" + tgt.name();
    c.V = vector_rep(base);
    c.target = cartan(s, n + 1);
    c.targets = {vector_rep(tgt)};
    if (s == 'A') {
        c.R = closed_R_typeA(n + 1);
        c.lambda = lambda_typeA(n + 1);
        c.Rprime = build_Rprime(c.R, RprimeFamily::TypeA);
        c.table = n == 2 ? mtable_example("A2") : mtable_typeA(n + 1);
        c.table_f_sign = -1;
        c.notes.push_back("K_i^{1/" + std::to_string(n + 1) + "} adjoined");
    } else {
        c.R = closed_R_BCD(base);
        c.lambda = lambda_BCD();
        c.Rprime = build_Rprime(c.R, RprimeFamily::BCD, base);
        c.table = mtable_BCD(base);
        c.table_f_sign = 1;
    }
    c.new_node = n;
    return c;
}

inline CaseMap make_crossing_case(Crossing x) {
    CaseMap c;
    c.V = crossing_rep(x);
    c.base = crossing_name(x);
    c.target = crossing_target_cartan(x);
    c.name = c.V.cartan.name + "-" + c.target.name;
    c.targets = {crossing_target_vector_rep(x)};
    c.R = universal_R(c.V, c.V).scaled(crossing_scale(x));
    c.lambda = lambda_crossing(x);
    RprimeFamily fam = x == Crossing::A1B2 ? RprimeFamily::A1B2 : x == Crossing::A2C3 ? RprimeFamily::A2C3 : RprimeFamily::A3D4;
    c.Rprime = build_Rprime(c.R, fam);
    c.table = mtable_example(crossing_name(x));
    c.table_f_sign = -1;
    c.new_node = c.target.rank - 1;
    return c;
}

// q_* = q_new: the target's [E_new, F_new] normalization
inline Scalar qstar_for(const CaseMap& c) { return Scalar::q(c.target.d[c.new_node]); }

inline void finish_case(CaseMap& c) {
    c.qstar = qstar_for(c);
    c.e_top = QGExpression::E(c.new_node);
    c.f_top = QGExpression::F(c.new_node);
    c.k_new = QGExpression::K({{c.new_node, 1}});
}

inline std::vector<std::string> case_names() {
    return {"A1-A2", "A2-A3", "A3-A4", "B2-B3", "C3-C4", "D4-D5", "A1-B2", "A2-C3", "A3-D4"};
}

// strong = also the target's (vector (x) vector) rep for A1-B2 and A2-A3
inline CaseMap builtin_case(const std::string& name, bool strong = true) {
    CaseMap c;
    if (name == "A1-A2") c = make_series_case('A', 1);
    else if (name == "A2-A3") c = make_series_case('A', 2);
    else if (name == "A3-A4") c = make_series_case('A', 3);
    else if (name == "B2-B3") c = make_series_case('B', 2);
    else if (name == "C3-C4") c = make_series_case('C', 3);
    else if (name == "D4-D5") c = make_series_case('D', 4);
    else if (name == "A1-B2") c = make_crossing_case(Crossing::A1B2);
    else if (name == "A2-C3") c = make_crossing_case(Crossing::A2C3);
    else if (name == "A3-D4") c = make_crossing_case(Crossing::A3D4);
    else throw UnknownCase("unknown case: " + name);
    finish_case(c);
    if (strong && (name == "A1-B2" || name == "A2-A3")) {
        auto t = tensor_rep(c.targets[0], c.targets[0]);
        t.name = c.targets[0].name + "x" + c.targets[0].name;
        c.targets.push_back(t);
    }
    return c;
}

inline std::vector<CaseMap> builtin_cases(bool strong = true) {
    std::vector<CaseMap> out;
    for (auto& n : case_names()) out.push_back(builtin_case(n, strong));
    return out;
}

// ---------------- images ----------------

struct VerifyOptions {
    bool side_reversed = false;
    Scalar gauge = Scalar(1);         // e^top -> mu e^top, f_top -> mu^-1 f_top
    std::optional<Gen> perturb;       // test hook: multiply this generator's image by q
};

// Images as num / den; den stays 1 unless extraction had to divide by a non-unit.
struct CaseImages {
    std::string rep;
    int w = 0, d = 0;
    std::map<Gen, FracMatrix> img;
    std::map<Gen, std::string> solved_by;  // extracted generator -> relation that fixed it
    Matrix k_new;
    MImages m;

    const FracMatrix* get(const Gen& g) const {
        auto it = img.find(g);
        return it == img.end() ? nullptr : &it->second;
    }
    FracMatrix* get_mut(const Gen& g) {
        auto it = img.find(g);
        return it == img.end() ? nullptr : &it->second;
    }
    bool has(const Gen& g) const { return img.count(g) > 0; }
    void set(const Gen& g, Matrix num, Scalar den = Scalar(1)) { img[g] = FracMatrix{std::move(num), std::move(den)}; }
};

namespace detail {
inline FracMatrix fmul(const FracMatrix& a, const FracMatrix& b) { return {a.num * b.num, a.den * b.den}; }
inline FracMatrix fadd(const FracMatrix& a, const FracMatrix& b) {
    if (a.den == b.den) return {a.num + b.num, a.den};
    return {a.num.scaled(b.den) + b.num.scaled(a.den), a.den * b.den};
}
inline FracMatrix fscale(const FracMatrix& a, const Scalar& s) { return {a.num.scaled(s), a.den}; }
// entry (i, j) of a / b as text
inline std::string fentry(const FracMatrix& a, int i, int j) {
    std::string n = a.num.get(i, j).str();
    return a.den == Scalar(1) ? n : "(" + n + ") / (" + a.den.str() + ")";
}
}  // namespace detail

inline EvalConvention target_convention(bool side_reversed = false) {
    EvalConvention cv;
    cv.f_sign = -1;
    cv.side_reversed = side_reversed;
    return cv;
}

inline Matrix diag_inverse(const Matrix& d) {
    if (!d.is_diagonal()) throw NonInvertibleScalar("not diagonal");
    std::vector<Scalar> v;
    for (int i = 0; i < d.rows(); ++i) v.push_back(d.get(i, i).inverse());
    return Matrix::diagonal(v);
}

inline std::vector<int> identity_map(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

// Known images in one target rep: e^top, f_top, c, all m+-; other e, f left open.
inline CaseImages seed_images(const CaseMap& cs, const Representation& T, const VerifyOptions& opt = {}) {
    CaseImages im;
    im.rep = T.name;
    im.w = T.dim;
    im.d = cs.dim();
    const int d = cs.dim(), top = cs.top();
    auto cv = target_convention();
    im.set(Gen{'e', top}, eval_expr(cs.e_top, T, nullptr, cv).scaled(opt.gauge));
    im.set(Gen{'f', top}, eval_expr(cs.f_top, T, nullptr, cv).scaled(opt.gauge.inverse()));
    im.m = m_images(cs.V, restrict_rep(T, cs.V.cartan, identity_map(cs.V.cartan.rank)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            im.set(Gen{'+', i, j}, im.m.p(i, j));
            im.set(Gen{'-', i, j}, im.m.m(i, j));
        }
    im.k_new = eval_expr(cs.k_new, T, nullptr, cv);
    Matrix c = im.m.p(top, top) * diag_inverse(im.k_new);
    im.set(Gen{'c'}, c);
    im.set(Gen{'i'}, diag_inverse(c));
    return im;
}

namespace detail {
// product of the factors strictly before (before = true) or after the factor at word position skip, in
// evaluation order; the whole word when skip < 0
inline FracMatrix word_product(const std::vector<Gen>& w, const CaseImages& im, bool reversed, int skip = -1,
                               bool before = true) {
    FracMatrix acc{Matrix::identity(im.w), Scalar(1)};
    const int n = (int)w.size();
    auto ord = [&](int p) { return reversed ? n - 1 - p : p; };
    for (int s = 0; s < n; ++s) {
        int p = reversed ? n - 1 - s : s;
        if (skip >= 0 && (before ? ord(p) >= ord(skip) : ord(p) <= ord(skip))) continue;
        const FracMatrix* m = im.get(w[p]);
        if (!m) throw ExtractionStuck("unknown image " + w[p].str());
        acc = fmul(acc, *m);
    }
    return acc;
}
inline FracMatrix side_value(const std::vector<Monomial>& ts, const CaseImages& im, bool reversed, int skip_term = -1) {
    FracMatrix acc{Matrix(im.w, im.w), Scalar(1)};
    for (int t = 0; t < (int)ts.size(); ++t) {
        if (t == skip_term) continue;
        acc = fadd(acc, fscale(word_product(ts[t].word, im, reversed), ts[t].coef));
    }
    return acc;
}
inline bool invertible_diag(const FracMatrix& f) {
    const Matrix& m = f.num;
    if (!m.is_diagonal()) return false;
    for (int i = 0; i < m.rows(); ++i)
        if (!m.get(i, i).is_monomial()) return false;
    return true;
}
}  // namespace detail

inline std::string str_indices(const std::vector<int>& idx) {
    std::string s = "(";
    for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? "," : "") + std::to_string(idx[k]);
    return s + ")";
}

// Try to fix one open e/f image from relation r: exactly one open generator occurrence in the whole
// relation, with invertible diagonal known neighbours in its term. The term's scalar must divide exactly.
inline std::optional<std::pair<Gen, FracMatrix>> solve_one(const Relation& r, const CaseImages& im, bool reversed) {
    int side = -1, term = -1, pos = -1, count = 0;
    for (int s = 0; s < 2; ++s) {
        auto& ts = s == 0 ? r.lhs : r.rhs;
        for (int t = 0; t < (int)ts.size(); ++t)
            for (int p = 0; p < (int)ts[t].word.size(); ++p)
                if (!im.has(ts[t].word[p])) {
                    ++count;
                    side = s, term = t, pos = p;
                }
    }
    if (count != 1) return std::nullopt;
    const Monomial& mono = (side == 0 ? r.lhs : r.rhs)[term];
    FracMatrix X = detail::word_product(mono.word, im, reversed, pos, true);
    FracMatrix Y = detail::word_product(mono.word, im, reversed, pos, false);
    if (!detail::invertible_diag(X) || !detail::invertible_diag(Y)) return std::nullopt;
    // lhs - rhs = 0 with the open term set aside: coef X u Y = -(rest) on the lhs, = rest on the rhs
    FracMatrix rest = detail::fadd(detail::side_value(r.lhs, im, reversed, side == 0 ? term : -1),
                                   detail::fscale(detail::side_value(r.rhs, im, reversed, side == 1 ? term : -1), Scalar(-1)));
    if (side == 0) rest.num = -rest.num;
    FracMatrix u{diag_inverse(X.num) * rest.num * diag_inverse(Y.num), rest.den};
    // (Xn / Xd)^-1 = Xd Xn^-1
    if (!(X.den == Scalar(1)) || !(Y.den == Scalar(1))) u.num = u.num.scaled(X.den * Y.den);
    // divide by the term scalar, exactly when possible
    Matrix out(im.w, im.w);
    bool exact = true;
    try {
        u.num.for_each([&](int i, int j, const Scalar& v) { out.set(i, j, v.divexact(mono.coef)); });
    } catch (std::exception&) {
        exact = false;
    }
    if (exact) return std::pair{mono.word[pos], FracMatrix{out, u.den}};
    return std::pair{mono.word[pos], FracMatrix{u.num, u.den * mono.coef}};
}

// Walk the cross relations (e via m+, f via m+, then the m- families), then the rest, until every e^i, f_i
// has an image. Deterministic: candidates are scanned in a fixed order and the first solvable one is taken.
inline void extract_images(const Presentation& p, CaseImages& im, bool reversed = false) {
    static const std::vector<std::string> order = {"e.m+", "m+.f", "m-.e", "f.m-"};
    std::vector<const Relation*> scan;
    for (auto& fam : order)
        for (auto& r : p.relations)
            if (r.family == fam) scan.push_back(&r);
    for (auto& r : p.relations)
        if (std::find(order.begin(), order.end(), r.family) == order.end()) scan.push_back(&r);
    auto missing = [&] {
        std::vector<std::string> m;
        for (int i = 0; i < p.dim; ++i) {
            if (!im.has(Gen{'e', i})) m.push_back(Gen{'e', i}.str());
            if (!im.has(Gen{'f', i})) m.push_back(Gen{'f', i}.str());
        }
        return m;
    };
    while (!missing().empty()) {
        bool progress = false;
        for (auto* r : scan) {
            auto res = solve_one(*r, im, reversed);
            if (!res) continue;
            auto& [g, m] = *res;
            im.img[g] = m;
            im.solved_by[g] = r->family + str_indices(r->indices);
            progress = true;
            break;
        }
        if (!progress) {
            std::string s;
            for (auto& x : missing()) s += " " + x;
            throw ExtractionStuck("no relation isolates a single unknown among:" + s);
        }
    }
}

// ---------------- verification ----------------

enum class Level { L1, L2 };
inline std::string level_name(Level l) { return l == Level::L1 ? "L1" : "L2"; }
inline Level parse_level(const std::string& s) {
    if (s == "L1") return Level::L1;
    if (s == "L2") return Level::L2;
    throw UnknownCase("unknown level: " + s);
}

// L1: e^top, f_top, c^{+-1} and the diagonal / minor-diagonal m+- entries only
inline bool in_l1(const Gen& g, int top) {
    switch (g.kind) {
        case 'e':
        case 'f': return g.i == top;
        case 'c':
        case 'i': return true;
        default: return std::abs(g.i - g.j) <= 1;
    }
}

struct Witness {
    std::string rep;
    int row = 0, col = 0;
    std::string lhs, rhs;
};
struct RelationRecord {
    std::string family;
    std::vector<int> indices;
    bool pass = true;
    std::optional<Witness> witness;
};

inline std::optional<Witness> check_relation(const Relation& r, const CaseImages& im, bool reversed) {
    FracMatrix l = detail::side_value(r.lhs, im, reversed), rr = detail::side_value(r.rhs, im, reversed);
    Matrix a = l.num.scaled(rr.den), b = rr.num.scaled(l.den);
    auto d = first_difference(a, b);
    if (!d) return std::nullopt;
    return Witness{im.rep, d->first, d->second, detail::fentry(l, d->first, d->second), detail::fentry(rr, d->first, d->second)};
}

// ---------------- Serre / Cartan suite ----------------

struct SerreRecord {
    std::string family;  // "serreE", "serreF", "KE", "KF", "EF"
    int i = 0, j = 0;    // 1-based target nodes
    bool pass = true;
    std::string rep;
};
struct SerreReport {
    std::vector<std::vector<int>> expected, reconstructed;
    std::vector<SerreRecord> records;
    bool ok() const {
        if (expected != reconstructed) return false;
        for (auto& r : records)
            if (!r.pass) return false;
        return true;
    }
};

// Target Chevalley generators in one rep; E_i = E[i] / Eden[i], likewise F. Every check below is
// homogeneous in each E and F, so numerators suffice apart from [E, F].
struct TargetGenerators {
    std::string rep;
    std::vector<Matrix> E, F, K, Kinv;
    std::vector<Scalar> Eden, Fden;
};

inline TargetGenerators target_generators(const CaseMap& cs, const Representation& T, const CaseImages& im) {
    TargetGenerators g;
    g.rep = T.name;
    auto cv = target_convention();
    for (int t = 0; t < cs.target.rank; ++t) {
        if (t == cs.new_node) {
            const FracMatrix& e = *im.get(Gen{'e', cs.top()});
            const FracMatrix& f = *im.get(Gen{'f', cs.top()});
            g.E.push_back(e.num);
            g.Eden.push_back(e.den);
            g.F.push_back(f.num);
            g.Fden.push_back(f.den);
            const FracMatrix& ci = *im.get(Gen{'i'});
            g.K.push_back(im.m.p(cs.top(), cs.top()) * ci.num);  // c^-1 is seeded with den 1
        } else {
            g.E.push_back(eval_letter({'E', t, 1}, T, nullptr, cv));
            g.F.push_back(eval_letter({'F', t, 1}, T, nullptr, cv));
            g.Eden.push_back(Scalar(1));
            g.Fden.push_back(Scalar(1));
            g.K.push_back(eval_letter({'K', t, 1}, T, nullptr, cv));
        }
        g.Kinv.push_back(diag_inverse(g.K.back()));
    }
    return g;
}

inline Matrix serre_sum(const Matrix& xi, const Matrix& xj, int deg, const mpq_class& di) {
    Matrix acc(xi.rows(), xi.cols());
    for (int k = 0; k <= deg; ++k) {
        Scalar c(q_binomial(deg, k, di));
        if (k % 2) c = -c;
        acc += (xi.pow(deg - k) * xj * xi.pow(k)).scaled(c);
    }
    return acc;
}

// Cartan commutation, [E_i, F_j], and q-Serre in the standard convention; a_ij is reconstructed as
// 1 - (least degree whose q-Serre sum vanishes in every rep, for both E and F).
inline SerreReport serre_check(const CartanData& target, const std::vector<TargetGenerators>& gens) {
    SerreReport rep;
    const int n = target.rank;
    rep.expected = target.a;
    rep.reconstructed.assign(n, std::vector<int>(n, 2));
    for (auto& g : gens)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Scalar qa = Scalar::q(target.gram[i][j]);
                rep.records.push_back({"KE", i + 1, j + 1, g.E[i] * g.K[j] == (g.K[j] * g.E[i]).scaled(qa), g.rep});
                rep.records.push_back({"KF", i + 1, j + 1, g.F[i] * g.K[j] == (g.K[j] * g.F[i]).scaled(qa.inverse()), g.rep});
                Scalar qi = Scalar::q(target.d[i]);
                Matrix lhs = (g.E[i] * g.F[j] - g.F[j] * g.E[i]).scaled(qi - qi.inverse());
                Matrix rhs = i == j ? (g.K[i] - g.Kinv[i]).scaled(g.Eden[i] * g.Fden[j]) : Matrix(g.E[i].rows(), g.E[i].cols());
                rep.records.push_back({"EF", i + 1, j + 1, lhs == rhs, g.rep});
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            int deg = 1 - target.a[i][j];
            for (auto& g : gens) {
                rep.records.push_back({"serreE", i + 1, j + 1, serre_sum(g.E[i], g.E[j], deg, target.d[i]).is_zero(), g.rep});
                rep.records.push_back({"serreF", i + 1, j + 1, serre_sum(g.F[i], g.F[j], deg, target.d[i]).is_zero(), g.rep});
            }
            int least = 0;
            for (int m = 1; m <= 5 && !least; ++m) {
                bool all = true;
                for (auto& g : gens)
                    all = all && serre_sum(g.E[i], g.E[j], m, target.d[i]).is_zero() &&
                          serre_sum(g.F[i], g.F[j], m, target.d[i]).is_zero();
                if (all) least = m;
            }
            rep.reconstructed[i][j] = least ? 1 - least : 99;
        }
    return rep;
}

// ---------------- case verification ----------------

struct VerifyReport {
    std::string case_name, level;
    bool side_reversed = false;
    std::string gauge;
    int f_sign = -1;
    std::string arrangement = "direct";
    std::vector<std::string> reps;
    std::vector<RelationRecord> relations;
    std::map<std::string, std::string> extracted;  // generator -> solving relation (first rep)
    std::optional<std::string> extraction_error;
    SerreReport serre;
    std::string qstar;
    long relation_total = 0;  // presentation size before level filtering

    long passed() const {
        long k = 0;
        for (auto& r : relations) k += r.pass;
        return k;
    }
    long failed() const { return (long)relations.size() - passed(); }
    bool ok() const { return failed() == 0 && serre.ok() && !extraction_error; }
};

// QDB_THREADS, default 1
inline unsigned thread_count() {
    const char* v = std::getenv("QDB_THREADS");
    if (!v) return 1;
    try {
        int n = std::stoi(v);
        return n > 0 ? (unsigned)n : 1;
    } catch (std::exception&) {
        return 1;
    }
}

inline Presentation case_presentation(const CaseMap& cs) {
    return build_presentation(cs.R, cs.Rprime, cs.lambda, cs.dim(), cs.qstar);
}

// Extraction errors at L2 propagate as ExtractionStuck.
inline VerifyReport verify_case(const CaseMap& cs, Level level, const VerifyOptions& opt = {}) {
    VerifyReport out;
    out.case_name = cs.name;
    out.level = level_name(level);
    out.side_reversed = opt.side_reversed;
    out.gauge = opt.gauge.str();
    out.qstar = cs.qstar.str();
    Presentation p = case_presentation(cs);
    out.relation_total = (long)p.relations.size();
    const int top = cs.top();
    std::vector<const Relation*> todo;
    for (auto& r : p.relations)
        if (level == Level::L2 || r.only([&](const Gen& g) { return in_l1(g, top); })) todo.push_back(&r);
    std::vector<CaseImages> ims;
    for (auto& T : cs.targets) {
        out.reps.push_back(T.name);
        CaseImages im = seed_images(cs, T, opt);
        if (level == Level::L2) extract_images(p, im, opt.side_reversed);
        if (opt.perturb) {
            FracMatrix* m = im.get_mut(*opt.perturb);
            if (!m) throw UnknownCase("perturbed generator has no image: " + opt.perturb->str());
            m->num = m->num.scaled(Scalar::q(1));
        }
        ims.push_back(std::move(im));
    }
    for (auto& [g, rel] : ims[0].solved_by) out.extracted[g.str()] = rel;
    out.relations.resize(todo.size());
    auto work = [&](std::size_t k) {
        const Relation* r = todo[k];
        RelationRecord rec{r->family, r->indices, true, std::nullopt};
        for (auto& im : ims) {
            auto w = check_relation(*r, im, opt.side_reversed);
            if (w) {
                rec.pass = false;
                rec.witness = w;
                break;
            }
        }
        out.relations[k] = std::move(rec);
    };
    // records land by relation index, so the report does not depend on the thread count
    const unsigned nt = std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, todo.size() / 64));
    if (nt <= 1) {
        for (std::size_t k = 0; k < todo.size(); ++k) work(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (std::size_t k; (k = next++) < todo.size();) work(k);
            });
        for (auto& th : pool) th.join();
    }
    std::vector<TargetGenerators> gens;
    for (std::size_t k = 0; k < cs.targets.size(); ++k) gens.push_back(target_generators(cs, cs.targets[k], ims[k]));
    out.serre = serre_check(cs.target, gens);
    return out;
}

// Sentinel for the side switch: e^top c = lambda c e^top holds in the normal convention and must fail
// when the side is flipped (lambda^2 != 1 in every catalog case).
inline bool side_sentinel_ok(const CaseMap& cs) {
    Presentation p = case_presentation(cs);
    const Relation* sent = nullptr;
    for (auto& r : p.relations)
        if (r.family == "ec" && r.indices[0] == cs.top() + 1) sent = &r;
    CaseImages im = seed_images(cs, cs.targets[0]);
    bool normal = !check_relation(*sent, im, false);
    bool flipped = !check_relation(*sent, im, true);
    return normal && !flipped;
}

// ---------------- table agreement ----------------

// Pairing-derived m+- images of the base vector rep V acting on W, against the case's symbolic table, for
// W = V and W = target vector rep restricted to the base; (C4) on the same images.
struct TableAgreement {
    std::vector<TableReport> tables;
    std::vector<C4Report> c4;
    // known entries only / known and extra entries
    bool known_ok() const {
        for (auto& t : tables)
            if (t.mismatches()) return false;
        return true;
    }
    bool all_ok() const {
        for (auto& t : tables)
            for (auto& e : t.entries)
                if (!e.ok) return false;
        return true;
    }
    bool c4_ok() const {
        for (auto& c : c4)
            if (!c.ok()) return false;
        return true;
    }
};

inline TableAgreement table_agreement(const CaseMap& cs) {
    TableAgreement out;
    Representation restricted = restrict_rep(cs.targets[0], cs.V.cartan, identity_map(cs.V.cartan.rank));
    for (const Representation* W : std::vector<const Representation*>{&cs.V, &restricted}) {
        MImages im = m_images(cs.V, *W);
        out.tables.push_back(compare_table(cs.table, im, *W, cs.table_f_sign));
        out.c4.push_back(c4_check(im, cs.R));
    }
    return out;
}

// ---------------- JSON ----------------

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const VerifyReport& r) {
    ordered_json j;
    j["case"] = r.case_name;
    j["level"] = r.level;
    j["scope"] = "relations evaluated exactly in the listed target representations; a necessary-condition "
                 "certificate, not an isomorphism proof";
    j["conventions"] = {
        {"index_arrangement", r.arrangement},
        {"index_layout", "R^{ik}_{jl} at row (i,k), col (j,l)"},
        {"bracket_convention", "[a,b]_x = ab - x ba"},
        {"side_convention", r.side_reversed ? "reversed" : "opposite-algebra, words read left to right"},
        {"letter_reading", "E -> F^T, F -> -E^T, K^y -> diag q^{-(y,mu)}"},
        {"q_star", r.qstar},
        {"gauge", r.gauge},
    };
    j["representations"] = r.reps;
    j["extracted"] = r.extracted;
    if (r.extraction_error) j["extraction_error"] = *r.extraction_error;
    ordered_json rels = ordered_json::array();
    for (auto& x : r.relations) {
        ordered_json o;
        o["family"] = x.family;
        o["indices"] = x.indices;
        o["status"] = x.pass ? "pass" : "fail";
        if (x.witness)
            o["witness"] = {{"rep", x.witness->rep}, {"row", x.witness->row}, {"col", x.witness->col},
                            {"lhs", x.witness->lhs}, {"rhs", x.witness->rhs}};
        rels.push_back(o);
    }
    j["relations"] = rels;
    ordered_json s;
    s["expected_cartan"] = r.serre.expected;
    s["reconstructed_cartan"] = r.serre.reconstructed;
    long sp = 0, sf = 0;
    ordered_json sfail = ordered_json::array();
    for (auto& x : r.serre.records) {
        if (x.pass) ++sp;
        else {
            ++sf;
            sfail.push_back({{"family", x.family}, {"i", x.i}, {"j", x.j}, {"rep", x.rep}});
        }
    }
    s["passed"] = sp;
    s["failed"] = sf;
    s["failures"] = sfail;
    j["serre"] = s;
    j["summary"] = {{"presentation_relations", r.relation_total},
                    {"checked", (long)r.relations.size()},
                    {"passed", r.passed()},
                    {"failed", r.failed()},
                    {"serre_ok", r.serre.ok()},
                    {"ok", r.ok()}};
    return j;
}

}  // namespace qdb
