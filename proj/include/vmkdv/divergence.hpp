#pragma once

// Decides whether two expressions agree modulo a total x-derivative, i.e.
// whether their integrals over a period coincide as functionals. Atom
// arguments are zero-mean by convention, so
//   f*Dxi(g) + g*Dxi(f)  ~ 0        (product rule)
//   Dx(F)*Dxi(g)         ~ -F*g     (integration by parts)
//   g*Dxi(g)             ~ 0        (perfect square)
// and on the local remainder exactness is decided by the Euler operator.

#include <vector>

#include "vmkdv/expr.hpp"

namespace vmkdv {

enum class Equiv { True, False, Undecided };

inline Equiv equivalent_mod_divergence(const Expression& a, const Expression& b) {
    Expression d = a - b;
    if (d.is_zero()) return Equiv::True;

    Expression local;
    std::vector<std::pair<ExprPtr, Expression>> cof;  // atom arg -> cofactor
    bool undecided = false;
    for (auto& [m, c] : d.terms()) {
        if (m.atoms.empty()) {
            local.add_term(m, c);
            continue;
        }
        if (m.atoms.size() != 1 || m.atoms[0].second != 1) {
            undecided = true;  // Dxi products/powers: no rewrite rule applies
            continue;
        }
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

    // integration by parts on the exact part of each cofactor
    for (auto& [g, C] : cof) {
        auto [F, r] = split_exact(C);
        if (!F.is_zero()) local -= F * (*g);
        C = r;
    }

    // coefficient of the leading (monic) monomial of g inside C
    auto lead_coeff = [](const Expression& C, const Expression& g) -> Rat {
        auto it = C.terms().find(g.terms().begin()->first);
        return it == C.terms().end() ? Rat(0) : it->second;
    };

    // perfect squares: alpha*g*Dxi(g) ~ 0
    for (auto& [g, C] : cof) {
        Rat alpha = lead_coeff(C, *g);
        if (alpha != 0) C -= alpha * (*g);
    }
    // symmetric pairs: beta*(g2*Dxi(g1) + g1*Dxi(g2)) ~ 0
    for (size_t i = 0; i < cof.size(); ++i)
        for (size_t j = i + 1; j < cof.size(); ++j) {
            Rat beta = lead_coeff(cof[i].second, *cof[j].first);
            if (beta == 0) continue;
            cof[i].second -= beta * (*cof[j].first);
            cof[j].second -= beta * (*cof[i].first);
        }

    for (auto& [g, C] : cof)
        if (!C.is_zero()) return Equiv::Undecided;
    if (undecided) return Equiv::Undecided;

    for (auto& [m, c] : local.terms())
        if (m.jets.empty()) return Equiv::False;  // nonzero constant density
    for (auto [f, comp] : variables_of(local))
        if (!euler_component(local, f, comp).is_zero()) return Equiv::False;
    return Equiv::True;
}

}  // namespace vmkdv
