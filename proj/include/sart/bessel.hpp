#pragma once

namespace sart {

// Bessel function of the first kind, order zero. Absolute error below 1e-10.
double bessel_j0(double z);

// Exponentially scaled modified Bessel function exp(-|x|) I0(x).
double bessel_i0e(double x);
// exp(-|x|) I1(x), odd in x.
double bessel_i1e(double x);

}  // namespace sart
