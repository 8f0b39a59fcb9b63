#pragma once

#include "blkit/baseflow.hpp"
#include "blkit/homogenize.hpp"

namespace blkit {

// Parameters of the balanced data family
//   u0(x) = sigma x,
//   V0 = c1 y^5 e^{-r1 y} + c2 y^5 e^{-r2 y} + c3 y^3 e^{-r1 y} + c4 y^4 e^{-r1 y},
//   f(x, y) = amp_f * x * y^3 e^{-r1 y}.
// c3, c4 enforce the order-1/2 corner conditions; c2 enforces the integral
// condition; c1 sets the amplitude.
struct CompatFamily {
    double sigma = 0.3;
    double amp_f = 0.5;
    double c1 = 1.0;
    double r1 = 3.0;
    double r2 = 3.5;
};

// Builds the DataSpec whose corner and integral conditions vanish for the
// given base flow (all residuals at the discrete-evaluation level).
DataSpec make_compatible_data(const BaseFlow& bf, const CompatFamily& fam = {});

} // namespace blkit
