#pragma once

#include <stdexcept>
#include <string>

namespace vmkdv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MaxOrderExceeded : Error {
    explicit MaxOrderExceeded(int order)
        : Error("jet order " + std::to_string(order) + " exceeds configured maximum") {}
};

struct NonlocalArgument : Error {
    NonlocalArgument() : Error("operation requires a local expression (no Dxi atoms)") {}
};

struct NestingDepth : Error {
    NestingDepth() : Error("Dxi nesting depth 1 exceeded") {}
};

struct NonzeroMean : Error {
    double mean;
    explicit NonzeroMean(double m)
        : Error("Dxi argument has nonzero mean " + std::to_string(m)), mean(m) {}
};

struct GimbalLock : Error {
    int i, j;
    double x;
    GimbalLock(int i_, int j_, double x_)
        : Error("cos(theta_{" + std::to_string(i_) + "," + std::to_string(j_) +
                "}) vanished near x = " + std::to_string(x_)),
          i(i_), j(j_), x(x_) {}
};

struct PositivityLoss : Error {
    PositivityLoss() : Error("leading Frenet curvature crossed zero") {}
};

struct BranchJump : Error {
    BranchJump() : Error("angle unwrapping jump exceeded pi between grid points") {}
};

struct BlowUp : Error {
    BlowUp() : Error("solution magnitude exceeded blow-up threshold") {}
};

struct StabilityViolation : Error {
    StabilityViolation() : Error("time step violates the stability guard") {}
};

struct InsufficientSnapshots : Error {
    InsufficientSnapshots() : Error("at least 5 uniformly spaced snapshots are required") {}
};

struct NonlocalHierarchyMember : Error {
    int k;
    explicit NonlocalHierarchyMember(int k_)
        : Error("hierarchy member " + std::to_string(k_) + " failed to localize"), k(k_) {}
};

struct ConsistencyDrift : Error {
    double value;
    explicit ConsistencyDrift(double v)
        : Error("curvatures recomputed from the curve drifted by " + std::to_string(v)),
          value(v) {}
};

}  // namespace vmkdv
