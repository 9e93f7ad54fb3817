// Prints the first members of the vector mKdV symmetry hierarchy and shows
// that the recursion operator factors through the Hamiltonian pair.

#include <iostream>

#include "vmkdv/operators.hpp"
#include "vmkdv/parser.hpp"

using namespace vmkdv;

int main() {
    const int n = 3;
    std::cout << "symmetry hierarchy for curvature fields with " << n - 1
              << " components (ambient dimension " << n << "):\n\n";
    auto hs = hierarchy(n, 2);
    for (size_t k = 0; k < hs.size(); ++k) {
        std::cout << "S" << k << ":\n";
        for (size_t c = 0; c < hs[k].size(); ++c)
            std::cout << "  comp" << c + 1 << " = " << print(hs[k][c]) << "\n";
        std::cout << "\n";
    }

    std::cout << "recursion operator = (cosymplectic) o (symplectic): ";
    VectorExpression P = fam_vec(Family::P, n);
    auto ip = vmkdv::apply(symplectic_I(n), P);
    auto hip = vmkdv::apply(cosymplectic_H(n), ip.v);
    auto rp = vmkdv::apply(recursion_R(n), P);
    bool same = true;
    for (int c = 0; c < n - 1; ++c) same = same && (hip.v[c] == rp.v[c]);
    std::cout << (same ? "exact match" : "MISMATCH") << "\n";
    return same ? 0 : 1;
}
