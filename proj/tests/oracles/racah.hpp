#pragma once

// Exact Clebsch-Gordan coefficients from the Racah sum, in rational arithmetic.
// Angular momenta are passed doubled (2j, 2m) so that everything is integral.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <stdexcept>

namespace oracle {

namespace mp = boost::multiprecision;

inline mp::cpp_int factorial(int n) {
  if (n < 0) throw std::logic_error("negative factorial");
  mp::cpp_int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double racah_cg(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  if (tm1 + tm2 != tM) return 0.0;
  if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ) return 0.0;
  if ((tj1 + tj2 + tJ) % 2 != 0 || (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0) return 0.0;
  auto h = [](int twice) { return twice / 2; };
  const int a = h(tJ + tj1 - tj2), b = h(tJ - tj1 + tj2), c = h(tj1 + tj2 - tJ),
            d = h(tj1 + tj2 + tJ) + 1;
  mp::cpp_rational pref = mp::cpp_rational((tJ + 1) * factorial(a) * factorial(b) * factorial(c),
                                           factorial(d));
  pref *= factorial(h(tJ + tM)) * factorial(h(tJ - tM)) * factorial(h(tj1 - tm1)) *
          factorial(h(tj1 + tm1)) * factorial(h(tj2 - tm2)) * factorial(h(tj2 + tm2));
  mp::cpp_rational sum = 0;
  for (int k = 0; k <= c + 1 + h(tj1 + tj2); ++k) {
    const int e[6] = {k,
                      c - k,
                      h(tj1 - tm1) - k,
                      h(tj2 + tm2) - k,
                      h(tJ - tj2 + tm1) + k,
                      h(tJ - tj1 - tm2) + k};
    if (*std::min_element(e, e + 6) < 0) continue;
    mp::cpp_int den = 1;
    for (int x : e) den *= factorial(x);
    sum += mp::cpp_rational(k % 2 == 0 ? 1 : -1, den);
  }
  if (sum == 0) return 0.0;
  using F = mp::cpp_bin_float_50;
  const F mag = mp::sqrt(F(pref * sum * sum));
  return static_cast<double>(sum > 0 ? mag : F(-mag));
}

}  // namespace oracle
