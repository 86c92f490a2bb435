#include "renyi/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace renyi {

namespace {

constexpr int kLogFactorialTableSize = 4096;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialTableSize);
    t[0] = 0.0;
    for (int i = 1; i < kLogFactorialTableSize; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  return table;
}

// log Gamma(k/2) for integer k >= 1.
double log_gamma_half(int k) {
  if (k < 1) throw std::domain_error("log_gamma_half: argument must be positive");
  if (k % 2 == 0) return log_factorial(k / 2 - 1);
  const int j = (k - 1) / 2;  // Gamma(j + 1/2) = (2j-1)!! sqrt(pi) / 2^j
  return log_double_factorial_odd(j) + 0.5 * std::log(std::numbers::pi) - j * std::numbers::ln2;
}

void check_xi(double xi, const char* who) {
  if (!(xi >= 0.0)) throw std::domain_error(std::string(who) + ": xi must be nonnegative");
}

// Gauss series 2F1(a, b; c; x) for a, b, c > 0 and 0 <= x < 1; every term is
// positive, so the partial sums are monotone.
double hyp2f1_positive(double a, double b, double c, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 5'000'000; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
    sum += term;
    const double ratio = (a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2.0)) * x;
    if (ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-17 * sum) return sum;
  }
  throw std::runtime_error("hyp2f1_positive: series did not converge");
}

// log of 2^-n C(n,k) C(2n-2k,n): coefficient of xi^(n-2k) in p_n(xi) = (-i)^n P_n(i xi).
double log_legendre_coeff(int n, int k) {
  return -n * std::numbers::ln2 + log_factorial(n) - log_factorial(k) - log_factorial(n - k) +
         log_factorial(2 * n - 2 * k) - log_factorial(n) - log_factorial(n - 2 * k);
}

// log of the prefactor (n-|m|)! / ((2n-1)!! (2n+1)!!) of j_n^m.
double log_j_prefactor(int n, int m) {
  return log_factorial(n - m) - log_double_factorial_odd(n) - log_double_factorial_odd(n + 1);
}

// log of the value at xi = 0 of the p-th derivative of p_n, zero unless
// n - p is even and nonnegative.
double log_poly_derivative_at_zero(int n, int p) {
  const int k = (n - p) / 2;
  return log_legendre_coeff(n, k) + log_factorial(p);
}

double log_h_at_zero(int n, int m) {
  return log_double_factorial_odd(n) + log_gamma_half(2 * n + 3) + 0.5 * std::log(std::numbers::pi) -
         log_gamma_half(n + m + 2) - log_gamma_half(n - m + 2);
}

}  // namespace

MultipoleIndex::MultipoleIndex(int degree, int order) : n(degree), m(order) {
  if (degree < 0 || order < -degree || order > degree)
    throw std::domain_error("MultipoleIndex: require n >= 0 and |m| <= n");
}

MultipoleIndex index_at(int flat) {
  if (flat < 0) throw std::domain_error("index_at: negative flat index");
  int n = static_cast<int>(std::sqrt(static_cast<double>(flat)));
  while (n * n > flat) --n;
  while ((n + 1) * (n + 1) <= flat) ++n;
  return MultipoleIndex(n, flat - n * n - n);
}

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  if (n >= kLogFactorialTableSize) throw std::domain_error("log_factorial: argument too large");
  return log_factorial_table()[n];
}

double log_double_factorial_odd(int n) {
  // (2n-1)!! = (2n)! / (2^n n!)
  if (n < 0) throw std::domain_error("log_double_factorial_odd: negative argument");
  return log_factorial(2 * n) - n * std::numbers::ln2 - log_factorial(n);
}

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (j1 < 0 || j2 < 0 || j3 < 0) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  if (m1 + m2 + m3 != 0) return 0.0;
  if (j3 > j1 + j2 || j3 < std::abs(j1 - j2)) return 0.0;

  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  if (kmin > kmax) return 0.0;

  const double log_pre =
      0.5 * (log_factorial(j1 + j2 - j3) + log_factorial(j1 - j2 + j3) + log_factorial(-j1 + j2 + j3) -
             log_factorial(j1 + j2 + j3 + 1) + log_factorial(j1 + m1) + log_factorial(j1 - m1) +
             log_factorial(j2 + m2) + log_factorial(j2 - m2) + log_factorial(j3 + m3) + log_factorial(j3 - m3));

  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double log_den = log_factorial(k) + log_factorial(j3 - j2 + k + m1) + log_factorial(j3 - j1 + k - m2) +
                           log_factorial(j1 + j2 - j3 - k) + log_factorial(j1 - k - m1) +
                           log_factorial(j2 - k + m2);
    const double term = std::exp(log_pre - log_den);
    sum += (k % 2 == 0) ? term : -term;
  }
  const int phase = j1 - j2 - m3;
  return (phase % 2 == 0) ? sum : -sum;
}

std::complex<double> sph_harm(MultipoleIndex idx, double eta, double phi) {
  if (!(std::abs(eta) <= 1.0)) throw std::domain_error("sph_harm: |eta| must not exceed 1");
  const int n = idx.n;
  const int am = std::abs(idx.m);
  const double sin_theta = std::sqrt(std::max(0.0, (1.0 - eta) * (1.0 + eta)));

  // Normalized associated Legendre function, Condon-Shortley phase included.
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int k = 1; k <= am; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sin_theta;

  double plm = pmm;
  if (n > am) {
    double prev = pmm;
    double cur = std::sqrt(2.0 * am + 3.0) * eta * pmm;
    for (int l = am + 2; l <= n; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l * l) - am * am));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - am * am) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      const double next = a * (eta * cur - b * prev);
      prev = cur;
      cur = next;
    }
    plm = cur;
  }

  const std::complex<double> y = std::polar(plm, am * phi);
  if (idx.m >= 0) return y;
  return (am % 2 == 0) ? std::conj(y) : -std::conj(y);
}

double j_fn(MultipoleIndex idx, double xi) {
  check_xi(xi, "j_fn");
  const int n = idx.n;
  const int m = std::abs(idx.m);
  const double log_pre = log_j_prefactor(n, m) + 0.5 * m * std::log1p(xi * xi);

  if (xi == 0.0) {
    if ((n - m) % 2 != 0) return 0.0;
    return std::exp(log_pre + log_poly_derivative_at_zero(n, m));
  }

  // sum over powers p of xi in p_n with p >= m, p = n, n-2, ...
  std::vector<double> log_terms;
  for (int p = n; p >= m; p -= 2) {
    const int k = (n - p) / 2;
    log_terms.push_back(log_legendre_coeff(n, k) + log_factorial(p) - log_factorial(p - m) +
                        (p - m) * std::log(xi));
  }
  const double top = *std::max_element(log_terms.begin(), log_terms.end());
  double sum = 0.0;
  for (double lt : log_terms) sum += std::exp(lt - top);
  return std::exp(log_pre + top + std::log(sum));
}

double log_h_fn(MultipoleIndex idx, double xi) {
  check_xi(xi, "h_fn");
  const int n = idx.n;
  const int m = std::abs(idx.m);
  const double log_h0 = log_h_at_zero(n, m);
  if (xi == 0.0) return log_h0;

  const double a = 0.5 * (n + m + 2);
  const double b = 0.5 * (n - m + 2);
  const double c = n + 1.5;
  const double log_1p_xi2 = std::log1p(xi * xi);

  if (xi >= 0.1) {
    const double t = 1.0 / (1.0 + xi * xi);
    const double f = hyp2f1_positive(a, b, c, t);
    return log_double_factorial_odd(n) + std::log(xi) - 0.5 * (n + 2) * log_1p_xi2 + std::log(f);
  }

  // Near the disk: continue the series about t = 1 (c - a - b = -1/2).
  const double s = xi * xi / (1.0 + xi * xi);
  const double f1 = hyp2f1_positive(a, b, 1.5, s);
  const double f2 = hyp2f1_positive(c - a, c - b, 0.5, s);
  const double ratio = -2.0 * std::exp(log_gamma_half(n + m + 2) + log_gamma_half(n - m + 2) -
                                       log_gamma_half(n - m + 1) - log_gamma_half(n + m + 1));
  const double bracket = ratio * xi * f1 + std::sqrt(1.0 + xi * xi) * f2;
  return log_h0 - 0.5 * (n + 2) * log_1p_xi2 + std::log(bracket);
}

double h_fn(MultipoleIndex idx, double xi) { return std::exp(log_h_fn(idx, xi)); }

double j_fn_deriv(MultipoleIndex idx) {
  const int n = idx.n;
  const int m = std::abs(idx.m);
  if ((n - m) % 2 == 0) return 0.0;
  return std::exp(log_j_prefactor(n, m) + log_poly_derivative_at_zero(n, m + 1));
}

double h_fn_deriv(MultipoleIndex idx) {
  const int n = idx.n;
  const int m = std::abs(idx.m);
  // h'(0) = (2n-1)!! Gamma(n+3/2) Gamma(-1/2) / (Gamma((n-m+1)/2) Gamma((n+m+1)/2))
  const double log_mag = log_double_factorial_odd(n) + log_gamma_half(2 * n + 3) + std::numbers::ln2 +
                         0.5 * std::log(std::numbers::pi) - log_gamma_half(n - m + 1) -
                         log_gamma_half(n + m + 1);
  return -std::exp(log_mag);
}

}  // namespace renyi
