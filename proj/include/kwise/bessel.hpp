#pragma once

namespace kwise {

// Modified Bessel function of the second kind K_nu(x) for x > 0 and
// non-negative integer or half-integer order (2*nu must be a non-negative
// integer). Relative accuracy ~1e-12, comfortably inside the 1e-10 target
// the distribution code assumes. Half-integer orders use the closed forms;
// integer orders use the ascending series below x = 2 and an exponentially
// scaled trapezoid integral above, joined by upward recurrence.
double bessel_k(double nu, double x);

}  // namespace kwise
