#pragma once

#include <cstddef>
#include <vector>

namespace dve {

/// Piecewise polynomial on [breakpoints.front(), breakpoints.back()].
/// Segment i holds coefficients in the local variable (x - breakpoints[i]),
/// lowest order first. Evaluation outside the domain extrapolates with the
/// nearest segment.
class PiecewisePoly {
 public:
  PiecewisePoly() = default;
  PiecewisePoly(std::vector<double> breakpoints,
                std::vector<std::vector<double>> segment_coeffs);

  /// Single polynomial on [0, 1], coefficients in x, lowest order first.
  static PiecewisePoly polynomial(std::vector<double> coeffs);

  /// Constant function on [0, 1].
  static PiecewisePoly constant(double value);

  /// Continuous piecewise-linear interpolant of (xs, ys).
  static PiecewisePoly linear_interpolant(const std::vector<double>& xs,
                                          const std::vector<double>& ys);

  /// Piecewise-constant function: values[i] on [breaks[i], breaks[i+1]).
  static PiecewisePoly step(const std::vector<double>& breaks,
                            const std::vector<double>& values);

  double value(double x) const;
  double derivative(double x) const;
  double operator()(double x) const { return value(x); }

  /// Exact derivative as a PiecewisePoly (discontinuities at breakpoints).
  PiecewisePoly derivative_poly() const;

  /// Antiderivative F with F(breakpoints.front()) = value_at_left, continuous
  /// across breakpoints.
  PiecewisePoly antiderivative(double value_at_left = 0.0) const;

  /// Pointwise sum; breakpoints are merged.
  static PiecewisePoly sum(const PiecewisePoly& f, const PiecewisePoly& g);

  /// Coefficients of p(alpha * s + beta) given coefficients of p(y).
  static std::vector<double> affine_substitution(
      const std::vector<double>& coeffs, double alpha, double beta);

  const std::vector<double>& breakpoints() const { return breaks_; }
  bool empty() const { return breaks_.empty(); }

 private:
  std::size_t segment_index(double x) const;

  std::vector<double> breaks_;
  std::vector<std::vector<double>> coeffs_;
};

}  // namespace dve
