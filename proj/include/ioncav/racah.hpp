#pragma once

// General Clebsch-Gordan coefficients from Racah's closed form. All angular
// momenta are passed doubled (2j, 2m) so half-integers stay integral.

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ioncav {

namespace detail {

inline double factorial(int n) { return n < 0 ? 0.0 : std::tgamma(n + 1.0); }

}  // namespace detail

/// <j1 m1; j2 m2 | J M>, Condon-Shortley phases. Zero for any invalid or
/// non-coupling combination.
inline double racah_cg(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  auto valid = [](int tj, int tm) { return tj >= 0 && std::abs(tm) <= tj && (tj - tm) % 2 == 0; };
  if (!valid(tj1, tm1) || !valid(tj2, tm2) || !valid(tJ, tM)) return 0.0;
  if (tm1 + tm2 != tM) return 0.0;
  if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2 || (tj1 + tj2 + tJ) % 2 != 0) return 0.0;

  using detail::factorial;
  const int a = (tj1 + tj2 - tJ) / 2;
  const int b = (tj1 - tj2 + tJ) / 2;
  const int c = (-tj1 + tj2 + tJ) / 2;
  const int d = (tj1 + tj2 + tJ) / 2 + 1;
  const double pref = std::sqrt((tJ + 1.0) * factorial(a) * factorial(b) * factorial(c) / factorial(d));
  const double norm = std::sqrt(factorial((tj1 + tm1) / 2) * factorial((tj1 - tm1) / 2) *
                                factorial((tj2 + tm2) / 2) * factorial((tj2 - tm2) / 2) *
                                factorial((tJ + tM) / 2) * factorial((tJ - tM) / 2));
  double sum = 0.0;
  for (int k = 0; k <= a; ++k) {
    const int e1 = a - k;
    const int e2 = (tj1 - tm1) / 2 - k;
    const int e3 = (tj2 + tm2) / 2 - k;
    const int e4 = (tJ - tj2 + tm1) / 2 + k;
    const int e5 = (tJ - tj1 - tm2) / 2 + k;
    if (e1 < 0 || e2 < 0 || e3 < 0 || e4 < 0 || e5 < 0) continue;
    const double term = 1.0 / (factorial(k) * factorial(e1) * factorial(e2) * factorial(e3) *
                               factorial(e4) * factorial(e5));
    sum += (k % 2 ? -term : term);
  }
  return pref * norm * sum;
}

}  // namespace ioncav
