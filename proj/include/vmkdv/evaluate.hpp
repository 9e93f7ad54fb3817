#pragma once

// Numerical evaluation of Expressions on periodic grid data.

#include <map>

#include "vmkdv/expr.hpp"
#include "vmkdv/grid.hpp"

namespace vmkdv {

// grid samples for each family occurring in an expression; component c of a
// family is entry c-1 of its VectorField
using FieldData = std::map<Family, VectorField>;

struct EvalOptions {
    // Dxi atom arguments must be zero-mean: |mean| <= mean_tol_rel * ||arg||.
    // With project_mean the mean is subtracted instead of raising NonzeroMean
    // (the operator identity checks run in this projected convention).
    bool project_mean = false;
    double mean_tol_rel = 1e-10;
};

class Evaluator {
public:
    Evaluator(const FieldData& data, EvalOptions opt = {}) : data_(data), opt_(opt) {
        const auto& ref = data.begin()->second.at(0);
        N_ = ref.N();
        L_ = ref.L;
    }

    GridFunction operator()(const Expression& e) {
        GridFunction out(N_, L_);
        for (auto& [m, c] : e.terms()) {
            GridFunction t(N_, L_, static_cast<double>(c));
            for (auto& [j, p] : m.jets) {
                const GridFunction& f = jet_samples(j);
                for (int k = 0; k < p; ++k) t = t * f;
            }
            for (auto& [arg, p] : m.atoms) {
                const GridFunction& f = atom_samples(arg);
                for (int k = 0; k < p; ++k) t = t * f;
            }
            out = out + t;
        }
        return out;
    }

private:
    const GridFunction& jet_samples(const Jet& j) {
        auto key = std::tuple(j.fam, j.comp, j.order);
        auto it = jets_.find(key);
        if (it != jets_.end()) return it->second;
        auto fam = data_.find(j.fam);
        if (fam == data_.end() || j.comp < 1 ||
            j.comp > static_cast<int>(fam->second.size()))
            throw Error("no grid data for component " + std::to_string(j.comp) +
                        " of family " + family_name(j.fam));
        const GridFunction& base = fam->second[j.comp - 1];
        GridFunction d = (j.order == 0) ? base : spectral_derivative(base, j.order);
        return jets_.emplace(key, std::move(d)).first->second;
    }

    const GridFunction& atom_samples(const ExprPtr& arg) {
        auto it = atoms_.find(arg.get());
        if (it != atoms_.end()) return it->second;
        GridFunction g = (*this)(*arg);
        double mu = mean(g);
        double scale = norm_l2(g) + 1e-300;
        if (std::abs(mu) > opt_.mean_tol_rel * scale && !opt_.project_mean)
            throw NonzeroMean(mu);
        GridFunction F = spectral_antiderivative(g);  // projects the mean away
        return atoms_.emplace(arg.get(), std::move(F)).first->second;
    }

    const FieldData& data_;
    EvalOptions opt_;
    int N_ = 0;
    double L_ = 0;
    std::map<std::tuple<Family, int, int>, GridFunction> jets_;
    std::map<const Expression*, GridFunction> atoms_;
};

inline GridFunction evaluate_on_grid(const Expression& e, const FieldData& data,
                                     EvalOptions opt = {}) {
    return Evaluator(data, opt)(e);
}

}  // namespace vmkdv
