#pragma once

#include <cmath>
#include <stdexcept>

namespace mfedge {

// Golden-section search for the minimizer of a unimodal f on [a, b].
template <class F>
double golden_section_minimize(F&& f, double a, double b, double x_tol, int max_iter = 300) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

// Bisection root of f on a bracketing interval [a, b] (f(a), f(b) of
// opposite sign or zero at an endpoint).
template <class F>
double bisect_root(F&& f, double a, double b, double x_tol, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("bisect_root: interval does not bracket a root");
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace mfedge
