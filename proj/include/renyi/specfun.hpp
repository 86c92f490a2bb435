#pragma once

#include <complex>

namespace renyi {

/// Partial-wave label (n, m) with |m| <= n.
struct MultipoleIndex {
  int n = 0;
  int m = 0;

  constexpr MultipoleIndex() = default;
  MultipoleIndex(int degree, int order);

  friend constexpr bool operator==(MultipoleIndex, MultipoleIndex) = default;
};

/// Position of (n, m) in the lexicographic ordering n ascending, m = -n..n.
constexpr int flat_index(MultipoleIndex idx) { return idx.n * idx.n + idx.n + idx.m; }
constexpr int basis_size(int n_max) { return (n_max + 1) * (n_max + 1); }
MultipoleIndex index_at(int flat);

/// Wigner 3j symbol. Selection-rule violations return 0.
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);

/// Orthonormal spherical harmonic with Condon-Shortley phase; eta = cos(theta).
std::complex<double> sph_harm(MultipoleIndex idx, double eta, double phi);

// Oblate spheroidal radial functions of the electrostatic (c -> 0) limit,
// normalized so that j_n^m(xi) ~ xi^n / (2n+1)!! and
// h_n^m(xi) ~ (2n-1)!! / xi^(n+1) at large xi. Both are real and nonnegative
// on xi >= 0 and depend on |m| only.
double j_fn(MultipoleIndex idx, double xi);
double h_fn(MultipoleIndex idx, double xi);

// Natural logarithm of h_fn; finite for all degrees that fit in a double
// exponent range.
double log_h_fn(MultipoleIndex idx, double xi);

// d/dxi at xi = 0.
double j_fn_deriv(MultipoleIndex idx);
double h_fn_deriv(MultipoleIndex idx);

// log((2n-1)!!) with (-1)!! = 1.
double log_double_factorial_odd(int n);
double log_factorial(int n);

}  // namespace renyi
