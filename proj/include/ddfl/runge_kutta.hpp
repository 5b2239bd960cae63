#ifndef DDFL_RUNGE_KUTTA_HPP
#define DDFL_RUNGE_KUTTA_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ddfl/errors.hpp"

namespace ddfl {

// Dormand-Prince 5(4) coefficients. The last stage of the 5th-order result
// doubles as the first stage of the next step (FSAL).
namespace dopri5 {
inline constexpr double c2 = 1.0 / 5.0;
inline constexpr double c3 = 3.0 / 10.0;
inline constexpr double c4 = 4.0 / 5.0;
inline constexpr double c5 = 8.0 / 9.0;

inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;

// 5th-order weights (also the 7th stage position).
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                        b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                        b6 = 11.0 / 84.0;

// Difference between the 5th- and embedded 4th-order weights.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                        e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

inline constexpr double safety = 0.9;
inline constexpr double shrink_floor = 0.2;
inline constexpr double grow_cap = 5.0;
}  // namespace dopri5

// Integrates y' = rhs(y) (autonomous) from 0 to span with embedded error
// control and returns y(span). Each component is held to
// |err_i| <= abs_tol + rel_tol * max(|y_i|, |y_new_i|).
//
// Throws FiniteEscapeError when the accepted state leaves ||y|| <= guard_norm,
// when step-size control underflows (typical for finite escape times), or
// when the step budget runs out. The error carries the time reached.
template <typename Scalar, int N, typename Rhs>
Eigen::Matrix<Scalar, N, 1> integrate_dopri5(const Rhs& rhs,
                                             Eigen::Matrix<Scalar, N, 1> y,
                                             Scalar span, Scalar rel_tol,
                                             Scalar abs_tol,
                                             Scalar guard_norm) {
  using Vec = Eigen::Matrix<Scalar, N, 1>;
  namespace dp = dopri5;

  if (!(span >= Scalar(0))) throw Error("integrate_dopri5: span must be >= 0");
  if (span == Scalar(0)) return y;
  if (!y.allFinite() || y.norm() > guard_norm)
    throw FiniteEscapeError("integrate_dopri5: initial state outside guard", 0.0);

  Scalar t = 0;
  Scalar h = span;
  Vec k1 = rhs(y);
  const long max_steps = 2'000'000;

  for (long step = 0; step < max_steps; ++step) {
    if (t >= span) return y;
    h = std::min(h, span - t);
    if (!(h > Scalar(0)) ||
        t + h == t) {  // increment no longer representable
      throw FiniteEscapeError("integrate_dopri5: step size underflow",
                              static_cast<double>(t));
    }

    const Vec k2 = rhs(Vec(y + h * (dp::a21 * k1)));
    const Vec k3 = rhs(Vec(y + h * (dp::a31 * k1 + dp::a32 * k2)));
    const Vec k4 = rhs(Vec(y + h * (dp::a41 * k1 + dp::a42 * k2 + dp::a43 * k3)));
    const Vec k5 = rhs(Vec(y + h * (dp::a51 * k1 + dp::a52 * k2 +
                                    dp::a53 * k3 + dp::a54 * k4)));
    const Vec k6 = rhs(Vec(y + h * (dp::a61 * k1 + dp::a62 * k2 +
                                    dp::a63 * k3 + dp::a64 * k4 +
                                    dp::a65 * k5)));
    const Vec y5 = y + h * (dp::b1 * k1 + dp::b3 * k3 + dp::b4 * k4 +
                            dp::b5 * k5 + dp::b6 * k6);
    const Vec k7 = rhs(y5);
    const Vec err = h * (dp::e1 * k1 + dp::e3 * k3 + dp::e4 * k4 +
                         dp::e5 * k5 + dp::e6 * k6 + dp::e7 * k7);

    // Max over components of error against the mixed tolerance.
    Scalar ratio = 0;
    for (int i = 0; i < y.size(); ++i) {
      const Scalar scale =
          abs_tol + rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
      ratio = std::max(ratio, std::abs(err(i)) / scale);
    }

    if (ratio <= Scalar(1)) {  // NaN ratios fall through to the reject branch
      t += h;
      y = y5;
      k1 = k7;
      if (!y.allFinite() || y.norm() > guard_norm)
        throw FiniteEscapeError("integrate_dopri5: state left guard region",
                                static_cast<double>(t));
      const Scalar grow =
          ratio == Scalar(0)
              ? dp::grow_cap
              : std::min(Scalar(dp::grow_cap),
                         std::max(Scalar(dp::shrink_floor),
                                  Scalar(dp::safety) *
                                      std::pow(ratio, Scalar(-0.2))));
      h *= grow;
    } else {
      Scalar shrink = Scalar(dp::safety) * std::pow(ratio, Scalar(-0.2));
      if (!(shrink > Scalar(dp::shrink_floor))) shrink = dp::shrink_floor;
      if (!(shrink < Scalar(1))) shrink = Scalar(0.5);  // NaN ratio: halve
      h *= shrink;
    }
  }
  throw FiniteEscapeError("integrate_dopri5: step budget exhausted",
                          static_cast<double>(t));
}

}  // namespace ddfl

#endif  // DDFL_RUNGE_KUTTA_HPP
