#pragma once

// Exact differential polynomials in the curvature vector u and the formal
// vectors P, Q, h, with weakly nonlocal atoms Dxi(f) of nesting depth 1.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "vmkdv/errors.hpp"

namespace vmkdv {

using Rat = boost::multiprecision::cpp_rational;

// Maximum jet order admitted before Dx raises MaxOrderExceeded.
inline int max_jet_order = 12;

enum class Family : int { u = 0, P = 1, Q = 2, h = 3 };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::u: return "u";
        case Family::P: return "P";
        case Family::Q: return "Q";
        case Family::h: return "h";
    }
    return "?";
}

struct Jet {
    Family fam{};
    int comp = 1;   // 1-based component index
    int order = 0;  // number of x-derivatives

    friend auto operator<=>(const Jet&, const Jet&) = default;
};

class Expression;
using ExprPtr = std::shared_ptr<const Expression>;

int expr_cmp(const Expression& a, const Expression& b);

// Product of jet powers and atom powers; the rational coefficient lives in the
// enclosing Expression map.
struct Monomial {
    std::map<Jet, int> jets;
    std::vector<std::pair<ExprPtr, int>> atoms;  // sorted by expr_cmp of args

    bool operator==(const Monomial& o) const;
    int degree() const {
        int d = 0;
        for (auto& [j, p] : jets) d += p;
        for (auto& [a, p] : atoms) d += p;
        return d;
    }
    bool is_local() const { return atoms.empty(); }
};

int monomial_cmp(const Monomial& a, const Monomial& b);

struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return monomial_cmp(a, b) < 0;
    }
};

class Expression {
public:
    using Terms = std::map<Monomial, Rat, MonomialLess>;

    Expression() = default;
    explicit Expression(Rat c) {
        if (c != 0) terms_[Monomial{}] = std::move(c);
    }
    explicit Expression(long c) : Expression(Rat(c)) {}
    explicit Expression(Jet j) {
        Monomial m;
        m.jets[j] = 1;
        terms_[std::move(m)] = 1;
    }

    static Expression from_terms(Terms t) {
        Expression e;
        e.terms_ = std::move(t);
        return e;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_local() const {
        for (auto& [m, c] : terms_)
            if (!m.is_local()) return false;
        return true;
    }

    void add_term(const Monomial& m, const Rat& c) {
        if (c == 0) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Expression& operator+=(const Expression& o) {
        for (auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Expression& operator-=(const Expression& o) {
        for (auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Expression operator+(Expression a, const Expression& b) { return a += b; }
    friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
    friend Expression operator-(const Expression& a) {
        Expression r;
        for (auto& [m, c] : a.terms_) r.terms_.emplace(m, -c);
        return r;
    }

    friend Expression operator*(const Expression& a, const Expression& b);
    Expression& operator*=(const Expression& o) { return *this = *this * o; }
    friend Expression operator*(const Rat& c, const Expression& a) {
        Expression r;
        if (c == 0) return r;
        for (auto& [m, k] : a.terms_) r.terms_.emplace(m, c * k);
        return r;
    }

    bool operator==(const Expression& o) const { return expr_cmp(*this, o) == 0; }

private:
    Terms terms_;
};

inline bool Monomial::operator==(const Monomial& o) const {
    return monomial_cmp(*this, o) == 0;
}

inline int monomial_cmp(const Monomial& a, const Monomial& b) {
    if (int d = a.degree() - b.degree(); d != 0) return d < 0 ? -1 : 1;
    if (a.jets != b.jets) return a.jets < b.jets ? -1 : 1;
    size_t n = std::min(a.atoms.size(), b.atoms.size());
    for (size_t i = 0; i < n; ++i) {
        if (int c = expr_cmp(*a.atoms[i].first, *b.atoms[i].first); c != 0) return c;
        if (a.atoms[i].second != b.atoms[i].second)
            return a.atoms[i].second < b.atoms[i].second ? -1 : 1;
    }
    if (a.atoms.size() != b.atoms.size()) return a.atoms.size() < b.atoms.size() ? -1 : 1;
    return 0;
}

inline int expr_cmp(const Expression& a, const Expression& b) {
    auto ia = a.terms().begin(), ib = b.terms().begin();
    for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
        if (int c = monomial_cmp(ia->first, ib->first); c != 0) return c;
        if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
    }
    if (ia != a.terms().end()) return 1;
    if (ib != b.terms().end()) return -1;
    return 0;
}

inline Monomial mul_monomial(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (auto& [j, p] : b.jets) r.jets[j] += p;
    for (auto& [arg, p] : b.atoms) {
        bool merged = false;
        for (auto& [ra, rp] : r.atoms)
            if (expr_cmp(*ra, *arg) == 0) {
                rp += p;
                merged = true;
                break;
            }
        if (!merged) r.atoms.emplace_back(arg, p);
    }
    std::sort(r.atoms.begin(), r.atoms.end(), [](const auto& x, const auto& y) {
        return expr_cmp(*x.first, *y.first) < 0;
    });
    return r;
}

inline Expression operator*(const Expression& a, const Expression& b) {
    Expression r;
    for (auto& [ma, ca] : a.terms())
        for (auto& [mb, cb] : b.terms()) r.add_term(mul_monomial(ma, mb), ca * cb);
    return r;
}

// ---- convenience constructors ----

inline Expression jet(Family f, int comp, int order = 0) {
    return Expression(Jet{f, comp, order});
}
inline Expression uj(int comp, int order = 0) { return jet(Family::u, comp, order); }
inline Expression rational(long num, long den = 1) { return Expression(Rat(num) / den); }

// ---- total derivative ----

Expression total_derivative(const Expression& e);

inline Expression dx_monomial(const Monomial& m, const Rat& c) {
    Expression out;
    for (auto& [j, p] : m.jets) {
        if (j.order + 1 > max_jet_order) throw MaxOrderExceeded(j.order + 1);
        Monomial t = m;
        if (--t.jets[j] == 0) t.jets.erase(j);
        t.jets[Jet{j.fam, j.comp, j.order + 1}] += 1;
        out.add_term(t, c * p);
    }
    for (size_t i = 0; i < m.atoms.size(); ++i) {
        auto& [arg, p] = m.atoms[i];
        Monomial t = m;
        if (--t.atoms[i].second == 0) t.atoms.erase(t.atoms.begin() + i);
        Expression factor = Expression::from_terms({{t, c * p}});
        out += factor * (*arg);  // Dx(Dxi(f)) = f
    }
    return out;
}

inline Expression total_derivative(const Expression& e) {
    Expression out;
    for (auto& [m, c] : e.terms()) out += dx_monomial(m, c);
    return out;
}

inline Expression dx_pow(Expression e, int k) {
    for (int i = 0; i < k; ++i) e = total_derivative(e);
    return e;
}

// ---- partial derivative with respect to a jet ----

inline Expression partial(const Expression& e, const Jet& v) {
    Expression out;
    for (auto& [m, c] : e.terms()) {
        auto it = m.jets.find(v);
        if (it == m.jets.end()) continue;
        Monomial t = m;
        if (--t.jets[v] == 0) t.jets.erase(v);
        out.add_term(t, c * it->second);
    }
    return out;
}

inline int max_order(const Expression& e) {
    int q = -1;
    for (auto& [m, c] : e.terms())
        for (auto& [j, p] : m.jets) q = std::max(q, j.order);
    return q;
}

inline std::vector<std::pair<Family, int>> variables_of(const Expression& e) {
    std::vector<std::pair<Family, int>> vars;
    for (auto& [m, c] : e.terms())
        for (auto& [j, p] : m.jets) {
            std::pair<Family, int> v{j.fam, j.comp};
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
        }
    return vars;
}

// ---- Euler (variational) operator ----

inline Expression euler_component(const Expression& e, Family f, int comp) {
    if (!e.is_local()) throw NonlocalArgument();
    Expression out;
    int q = max_order(e);
    Rat sign = 1;
    for (int j = 0; j <= q; ++j, sign = -sign)
        out += sign * dx_pow(partial(e, Jet{f, comp, j}), j);
    return out;
}

// e is a total x-derivative iff all Euler components vanish and the constant
// term is absent.
inline bool is_exact(const Expression& e) {
    for (auto& [m, c] : e.terms())
        if (m.jets.empty() && m.atoms.empty()) return false;  // nonzero constant
    for (auto [f, comp] : variables_of(e))
        if (!euler_component(e, f, comp).is_zero()) return false;
    return true;
}

// ---- formal integration ----

// Integrate a polynomial expression with respect to a single jet variable v.
inline Expression integrate_in(const Expression& e, const Jet& v) {
    Expression out;
    for (auto& [m, c] : e.terms()) {
        Monomial t = m;
        int p = 0;
        if (auto it = t.jets.find(v); it != t.jets.end()) p = it->second;
        t.jets[v] = p + 1;
        out.add_term(t, c / (p + 1));
    }
    return out;
}

// If e = Dx F (exactly), returns F with integration constant 0.
inline std::optional<Expression> formal_integrate(const Expression& e) {
    if (!e.is_local()) throw NonlocalArgument();
    if (!is_exact(e)) return std::nullopt;
    Expression rem = e, G;
    while (!rem.is_zero()) {
        int q = max_order(rem);
        if (q <= 0) return std::nullopt;  // cannot happen for exact input
        // collect top-order variables present
        std::vector<Jet> tops;
        for (auto& [m, c] : rem.terms())
            for (auto& [j, p] : m.jets)
                if (j.order == q &&
                    std::find(tops.begin(), tops.end(), j) == tops.end())
                    tops.push_back(j);
        for (const Jet& t : tops) {
            Expression A = partial(rem, t);  // coefficient of the top jet
            if (A.is_zero()) continue;       // eliminated by an earlier sibling
            Expression Pk = integrate_in(A, Jet{t.fam, t.comp, q - 1});
            G += Pk;
            rem -= total_derivative(Pk);
        }
        if (max_order(rem) >= q) return std::nullopt;  // defensive: no progress
    }
    return G;
}

// ---- canonical reduction modulo exact derivatives (partial integration) ----

// Splits e = Dx(G) + r where r is in normal form: in every monomial of r the
// graded-maximal jet either has order 0, occurs nonlinearly, or is accompanied
// by an order-(q-1) jet on a graded-larger variable. Derivatives concentrate on
// the smaller variable in the (family, component) order.
inline std::pair<Expression, Expression> split_exact(const Expression& e) {
    if (!e.is_local()) throw NonlocalArgument();
    if (auto F = formal_integrate(e)) return {*F, Expression{}};
    Expression G, rem = e;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [m, c] : rem.terms()) {
            if (m.jets.empty()) continue;
            // graded-maximal jet: maximal (order, family, component)
            Jet top = m.jets.begin()->first;
            for (auto& [j, p] : m.jets)
                if (std::tuple(j.order, j.fam, j.comp) >
                    std::tuple(top.order, top.fam, top.comp))
                    top = j;
            if (top.order == 0 || m.jets.at(top) != 1) continue;
            bool reducible = true;
            for (auto& [j, p] : m.jets) {
                if (j == top) continue;
                if (j.order > top.order - 2 &&
                    !(j.order == top.order - 1 &&
                      std::pair(j.fam, j.comp) < std::pair(top.fam, top.comp))) {
                    reducible = false;
                    break;
                }
            }
            if (!reducible) continue;
            Monomial lowered = m;
            lowered.jets.erase(top);
            lowered.jets[Jet{top.fam, top.comp, top.order - 1}] += 1;
            Expression g = Expression::from_terms({{lowered, c}});
            G += g;
            rem -= total_derivative(g);
            changed = true;
            break;  // rem mutated; restart iteration
        }
    }
    return {G, rem};
}

// ---- atoms ----

inline Expression atom_of(const ExprPtr& arg, int power = 1) {
    Monomial m;
    m.atoms.emplace_back(arg, power);
    return Expression::from_terms({{std::move(m), Rat(1)}});
}

// Dxi(f): formal antiderivative. For local f the exact part is integrated away
// and the remainder kept as an atom with monic leading coefficient. Terms
// C*Dxi(g) are admitted when they reduce without deepening the nesting:
//   Dx(F)*A(g) -> F*A(g) - Dxi(F*g)   (integration by parts)
//   a*g*A(g)   -> a/2*A(g)^2          (perfect square)
// anything else raises NestingDepth.
inline Expression Dxi(const Expression& f) {
    if (f.is_zero()) return Expression{};
    if (!f.is_local()) {
        Expression local_part, out;
        std::vector<std::pair<ExprPtr, Expression>> cof;  // atom arg -> cofactor
        for (auto& [m, c] : f.terms()) {
            if (m.atoms.empty()) {
                local_part.add_term(m, c);
                continue;
            }
            if (m.atoms.size() != 1 || m.atoms[0].second != 1) throw NestingDepth();
            Monomial t = m;
            t.atoms.clear();
            Expression co = Expression::from_terms({{std::move(t), c}});
            bool merged = false;
            for (auto& [g, acc] : cof)
                if (g.get() == m.atoms[0].first.get() || *g == *m.atoms[0].first) {
                    acc += co;
                    merged = true;
                    break;
                }
            if (!merged) cof.emplace_back(m.atoms[0].first, std::move(co));
        }
        for (auto& [g, C] : cof) {
            auto [F, r] = split_exact(C);
            if (!F.is_zero()) out += F * atom_of(g) - Dxi(F * (*g));
            if (r.is_zero()) continue;
            // remainder must be a rational multiple of the atom argument
            Rat alpha = r.terms().begin()->second;  // g is monic
            if (!(r == alpha * (*g))) throw NestingDepth();
            out += (alpha / 2) * atom_of(g, 2);
        }
        return out + Dxi(local_part);
    }
    auto [G, r] = split_exact(f);
    if (r.is_zero()) return G;
    Rat lead = r.terms().begin()->second;
    Expression arg = (Rat(1) / lead) * r;
    Monomial m;
    m.atoms.emplace_back(std::make_shared<Expression>(std::move(arg)), 1);
    return G + Expression::from_terms({{std::move(m), lead}});
}

// ---- Frechet derivative ----

// Linearization of e with respect to the curvature family, in the direction of
// the jets of family dir: each u-jet occurrence is replaced by the matching
// direction jet (chain rule through atoms).
inline Expression frechet_derivative(const Expression& e, Family dir) {
    Expression out;
    for (auto& [m, c] : e.terms()) {
        for (auto& [j, p] : m.jets) {
            if (j.fam != Family::u) continue;
            Monomial t = m;
            if (--t.jets[j] == 0) t.jets.erase(j);
            t.jets[Jet{dir, j.comp, j.order}] += 1;
            out.add_term(t, c * p);
        }
        for (size_t i = 0; i < m.atoms.size(); ++i) {
            auto& [arg, p] = m.atoms[i];
            Monomial t = m;
            if (--t.atoms[i].second == 0) t.atoms.erase(t.atoms.begin() + i);
            Expression factor = Expression::from_terms({{t, c * p}});
            out += factor * Dxi(frechet_derivative(*arg, dir));
        }
    }
    return out;
}

// ---- substitution ----

// Replace every jet of the given (family, component) by zero.
inline Expression substitute_zero(const Expression& e, Family f, int comp) {
    Expression out;
    for (auto& [m, c] : e.terms()) {
        bool killed = false;
        for (auto& [j, p] : m.jets)
            if (j.fam == f && j.comp == comp) {
                killed = true;
                break;
            }
        if (killed) continue;
        if (m.atoms.empty()) {
            out.add_term(m, c);
            continue;
        }
        Monomial t = m;
        t.atoms.clear();
        Expression factor = Expression::from_terms({{t, c}});
        for (auto& [arg, p] : m.atoms) {
            Expression sub = Dxi(substitute_zero(*arg, f, comp));
            for (int k = 0; k < p; ++k) factor *= sub;
        }
        out += factor;
    }
    return out;
}

// Rename a family throughout (e.g. formal h -> P); local expressions only.
inline Expression rename_family(const Expression& e, Family from, Family to) {
    Expression out;
    for (auto& [m, c] : e.terms()) {
        Monomial t;
        t.jets = {};
        for (auto& [j, p] : m.jets)
            t.jets[Jet{j.fam == from ? to : j.fam, j.comp, j.order}] += p;
        if (!m.atoms.empty()) {
            Expression factor = Expression::from_terms({{t, c}});
            for (auto& [arg, p] : m.atoms) {
                Expression sub = Dxi(rename_family(*arg, from, to));
                for (int k = 0; k < p; ++k) factor *= sub;
            }
            out += factor;
        } else {
            out.add_term(t, c);
        }
    }
    return out;
}

}  // namespace vmkdv
