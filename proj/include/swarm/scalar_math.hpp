#pragma once

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace swarm {

// Principal branch of the Lambert function on [0, inf): the inverse of
// w -> w e^w. Halley iteration with a series guess near 0 and the
// log-asymptotic guess for large arguments.
template <std::floating_point T = double>
T lambert_w0(T x) {
  if (!(x >= T(0))) throw std::domain_error("lambert_w0: argument must be >= 0");
  if (x == T(0)) return T(0);

  const T e = std::exp(T(1));
  T w;
  if (x < T(0.5)) {
    w = x * (T(1) - x + T(1.5) * x * x);  // W = x - x^2 + 3/2 x^3 - ...
  } else if (x > e) {
    const T lx = std::log(x);
    const T llx = std::log(lx);
    w = lx - llx + llx / lx;
  } else {
    // interpolate between W(1/2) ~= 0.3517 and W(e) = 1
    w = T(0.3517) + (x - T(0.5)) * (T(1) - T(0.3517)) / (e - T(0.5));
  }

  for (int it = 0; it < 50; ++it) {
    const T ew = std::exp(w);
    const T f = w * ew - x;
    const T wp1 = w + T(1);
    const T denom = ew * wp1 - (w + T(2)) * f / (T(2) * wp1);
    const T step = f / denom;
    w -= step;
    if (std::abs(step) <= T(2) * std::numeric_limits<T>::epsilon() * (T(1) + std::abs(w))) break;
  }
  return w < T(0) ? T(0) : w;
}

// Overflow-safe evaluation of W_0(e^z): solves w + ln w = z without ever
// forming e^z. For z <= -40 the closed form w = e^z is exact to well below
// the 1e-12 relative-residual contract.
template <std::floating_point T = double>
T lambert_w0_exp(T z) {
  if (!std::isfinite(z)) throw std::domain_error("lambert_w0_exp: non-finite argument");
  if (z <= T(-40)) return std::exp(z);

  // h(w) = w + ln w - z is increasing and concave; bracket then apply
  // safeguarded Newton. For z >= 1:  h(z - ln z) <= 0 <= h(z).
  // For z < 1:        h(e^{z-1}) <= 0 <= h(e^{min(z,1)}).
  T lo, hi;
  if (z >= T(1)) {
    lo = z - std::log(z);
    hi = z;
  } else {
    lo = std::exp(z - T(1));
    hi = std::exp(std::min(z, T(1)));
  }

  T w = (z >= T(40)) ? z - std::log(z) : T(0.5) * (lo + hi);
  for (int it = 0; it < 80; ++it) {
    const T f = w + std::log(w) - z;
    if (f > T(0)) hi = w; else lo = w;
    T next = w - f * w / (w + T(1));
    if (!(next > lo && next < hi)) next = T(0.5) * (lo + hi);
    const T delta = std::abs(next - w);
    w = next;
    if (delta <= std::numeric_limits<T>::epsilon() * std::abs(w)) break;
  }
  return w;
}

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scalar root-finding problem on a sign-changing bracket.
struct BracketedFn {
  std::function<double(double)> f;
  double lo = 0.0;
  double hi = 0.0;
  double tol = 1e-12;
};

namespace detail {

// Brent's method: bisection, secant and inverse quadratic interpolation.
// Requires fa = f(a), fb = f(b) with fa * fb <= 0. Stops when |f| <= tol
// or the bracket width falls below tol.
template <typename F>
double brent_core(F&& f, double a, double b, double fa, double fb, double tol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa;
  double d = b - a;
  bool mflag = true;

  for (int it = 0; it < 200; ++it) {
    if (fb == 0.0 || std::abs(fb) <= tol || std::abs(b - a) <= tol) break;

    double s;
    if (fa != fc && fb != fc) {
      s = a * fb * fc / ((fa - fb) * (fa - fc)) +
          b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }

    const double m = 0.25 * (3.0 * a + b);
    const bool out_of_range = (s < std::min(m, b)) || (s > std::max(m, b));
    const bool step_too_small = mflag ? std::abs(s - b) >= 0.5 * std::abs(b - c)
                                      : std::abs(s - b) >= 0.5 * std::abs(c - d);
    const bool interval_too_small = mflag ? std::abs(b - c) < tol : std::abs(c - d) < tol;
    if (out_of_range || step_too_small || interval_too_small) {
      s = 0.5 * (a + b);
      mflag = true;
    } else {
      mflag = false;
    }

    const double fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if (fa * fs < 0.0) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  return b;
}

}  // namespace detail

inline double find_root(const BracketedFn& bf) {
  if (!(bf.tol > 0.0)) throw std::invalid_argument("find_root: tol must be > 0");
  const double fa = bf.f(bf.lo);
  const double fb = bf.f(bf.hi);
  if (fa * fb > 0.0)
    throw BracketError("find_root: no sign change on [" + std::to_string(bf.lo) + ", " +
                       std::to_string(bf.hi) + "]");
  return detail::brent_core(bf.f, bf.lo, bf.hi, fa, fb, bf.tol);
}

// Expands the upper endpoint by doubling until f changes sign, then solves.
// max_expansions exhausted -> BracketError.
template <typename F>
double find_root_expanding(F&& f, double lo, double hi, double tol, int max_expansions) {
  const double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  int used = 0;
  while (flo * fhi > 0.0) {
    if (++used > max_expansions)
      throw BracketError("find_root_expanding: no sign change after " +
                         std::to_string(max_expansions) + " doublings (lo=" +
                         std::to_string(lo) + ", hi=" + std::to_string(hi) + ")");
    hi *= 2.0;
    fhi = f(hi);
  }
  return detail::brent_core(f, lo, hi, flo, fhi, tol);
}

}  // namespace swarm
