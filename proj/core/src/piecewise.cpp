#include "dve/piecewise.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace dve {

PiecewisePoly::PiecewisePoly(std::vector<double> breakpoints,
                             std::vector<std::vector<double>> segment_coeffs)
    : breaks_(std::move(breakpoints)), coeffs_(std::move(segment_coeffs)) {
  if (breaks_.size() < 2 || coeffs_.size() + 1 != breaks_.size()) {
    throw std::invalid_argument("PiecewisePoly: inconsistent segment data");
  }
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    if (!(breaks_[i] < breaks_[i + 1])) {
      throw std::invalid_argument("PiecewisePoly: breakpoints must increase");
    }
  }
}

PiecewisePoly PiecewisePoly::polynomial(std::vector<double> coeffs) {
  return PiecewisePoly({0.0, 1.0}, {std::move(coeffs)});
}

PiecewisePoly PiecewisePoly::constant(double value) {
  return PiecewisePoly({0.0, 1.0}, {{value}});
}

PiecewisePoly PiecewisePoly::linear_interpolant(const std::vector<double>& xs,
                                                const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("linear_interpolant: need matching xs/ys");
  }
  std::vector<std::vector<double>> coeffs;
  coeffs.reserve(xs.size() - 1);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    coeffs.push_back({ys[i], slope});
  }
  return PiecewisePoly(xs, std::move(coeffs));
}

PiecewisePoly PiecewisePoly::step(const std::vector<double>& breaks,
                                  const std::vector<double>& values) {
  if (breaks.size() != values.size() + 1) {
    throw std::invalid_argument("step: need one more breakpoint than value");
  }
  std::vector<std::vector<double>> coeffs;
  coeffs.reserve(values.size());
  for (double v : values) coeffs.push_back({v});
  return PiecewisePoly(breaks, std::move(coeffs));
}

std::size_t PiecewisePoly::segment_index(double x) const {
  if (x <= breaks_.front()) return 0;
  if (x >= breaks_.back()) return coeffs_.size() - 1;
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  return static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

double PiecewisePoly::value(double x) const {
  const std::size_t i = segment_index(x);
  const double t = x - breaks_[i];
  const auto& c = coeffs_[i];
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

double PiecewisePoly::derivative(double x) const {
  const std::size_t i = segment_index(x);
  const double t = x - breaks_[i];
  const auto& c = coeffs_[i];
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    v = v * t + static_cast<double>(k) * c[k];
  }
  return v;
}

PiecewisePoly PiecewisePoly::derivative_poly() const {
  std::vector<std::vector<double>> dcoeffs;
  dcoeffs.reserve(coeffs_.size());
  for (const auto& c : coeffs_) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) {
      d.push_back(static_cast<double>(k) * c[k]);
    }
    if (d.empty()) d.push_back(0.0);
    dcoeffs.push_back(std::move(d));
  }
  return PiecewisePoly(breaks_, std::move(dcoeffs));
}

std::vector<double> PiecewisePoly::affine_substitution(
    const std::vector<double>& coeffs, double alpha, double beta) {
  // Horner in the polynomial ring: result = ((a_n (alpha s + beta) + a_{n-1})
  // (alpha s + beta) + ...).
  std::vector<double> result = {0.0};
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    std::vector<double> next(result.size() + 1, 0.0);
    for (std::size_t i = 0; i < result.size(); ++i) {
      next[i] += result[i] * beta;
      next[i + 1] += result[i] * alpha;
    }
    next[0] += coeffs[k];
    while (next.size() > 1 && next.back() == 0.0) next.pop_back();
    result = std::move(next);
  }
  return result;
}

PiecewisePoly PiecewisePoly::sum(const PiecewisePoly& f,
                                 const PiecewisePoly& g) {
  std::vector<double> breaks;
  breaks.reserve(f.breaks_.size() + g.breaks_.size());
  std::merge(f.breaks_.begin(), f.breaks_.end(), g.breaks_.begin(),
             g.breaks_.end(), std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<std::vector<double>> coeffs;
  coeffs.reserve(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double left = breaks[i];
    const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    std::vector<double> seg;
    for (const PiecewisePoly* p : {&f, &g}) {
      const std::size_t si = p->segment_index(mid);
      const std::vector<double> local = affine_substitution(
          p->coeffs_[si], 1.0, left - p->breaks_[si]);
      if (seg.size() < local.size()) seg.resize(local.size(), 0.0);
      for (std::size_t k = 0; k < local.size(); ++k) seg[k] += local[k];
    }
    coeffs.push_back(std::move(seg));
  }
  return PiecewisePoly(std::move(breaks), std::move(coeffs));
}

PiecewisePoly PiecewisePoly::antiderivative(double value_at_left) const {
  std::vector<std::vector<double>> icoeffs;
  icoeffs.reserve(coeffs_.size());
  double running = value_at_left;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const auto& c = coeffs_[i];
    std::vector<double> integral(c.size() + 1, 0.0);
    integral[0] = running;
    for (std::size_t k = 0; k < c.size(); ++k) {
      integral[k + 1] = c[k] / static_cast<double>(k + 1);
    }
    const double h = breaks_[i + 1] - breaks_[i];
    double end = 0.0;
    for (std::size_t k = integral.size(); k-- > 0;) end = end * h + integral[k];
    running = end;
    icoeffs.push_back(std::move(integral));
  }
  return PiecewisePoly(breaks_, std::move(icoeffs));
}

}  // namespace dve
