#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "revsphere/errors.hpp"

namespace revsphere {

// Piecewise-cubic Hermite interpolant on strictly increasing nodes.
// Exact derivative data gives O(h^4) accuracy; shape is preserved whenever
// the supplied derivatives are consistent with the data (see pchip_derivatives).
class HermiteTable {
 public:
  HermiteTable() = default;
  HermiteTable(std::vector<double> x, std::vector<double> y,
               std::vector<double> d)
      : x_(std::move(x)), y_(std::move(y)), d_(std::move(d)) {
    if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != d_.size())
      throw validation_error("HermiteTable: need >= 2 nodes, equal-length arrays");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1]))
        throw validation_error("HermiteTable: nodes must be strictly increasing");
  }

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }

  double eval(double x) const {
    const Local c = local(x);
    return c.y0 + c.t * (c.c1 + c.t * (c.c2 + c.t * c.c3));
  }

  double deriv(double x) const {
    const Local c = local(x);
    return c.c1 + c.t * (2.0 * c.c2 + c.t * 3.0 * c.c3);
  }

  double second(double x) const {
    const Local c = local(x);
    return 2.0 * c.c2 + 6.0 * c.c3 * c.t;
  }

 private:
  struct Local {
    double y0, c1, c2, c3, t;
  };

  Local local(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i >= x_.size() - 1) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double t = x - x_[i];
    const double s = (y_[i + 1] - y_[i]) / h;
    const double c2 = (3.0 * s - 2.0 * d_[i] - d_[i + 1]) / h;
    const double c3 = (d_[i] + d_[i + 1] - 2.0 * s) / (h * h);
    return {y_[i], d_[i], c2, c3, t};
  }

  std::vector<double> x_, y_, d_;
};

// Fritsch-Carlson monotone slopes for data (x_i, y_i): the resulting
// Hermite interpolant has no overshoot between nodes.
inline std::vector<double> pchip_derivatives(const std::vector<double>& x,
                                             const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw validation_error("pchip_derivatives: need >= 2 samples");
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    if (!(h[i] > 0.0))
      throw validation_error("pchip_derivatives: x must be strictly increasing");
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // One-sided ends (shape-limited three-point formula).
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0)
      s = 0.0;
    else if (d0 * d1 <= 0.0 && std::abs(s) > 3.0 * std::abs(d0))
      s = 3.0 * d0;
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

}  // namespace revsphere
