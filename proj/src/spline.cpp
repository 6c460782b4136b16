#include "detshock/spline.hpp"

#include <algorithm>
#include <utility>

#include "detshock/errors.hpp"

namespace detshock {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y,
                         double slope_left, double slope_right)
    : x_(std::move(x)), y_(std::move(y)), sl_(slope_left), sr_(slope_right) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw DomainError("CubicSpline: need >= 2 nodes with matching values");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw DomainError("CubicSpline: nodes must be strictly increasing");
  // Tridiagonal system for nodal second derivatives (Thomas algorithm).
  std::vector<double> a(n), b(n), c(n), d(n);
  const double h0 = x_[1] - x_[0];
  b[0] = h0 / 3.0;
  c[0] = h0 / 6.0;
  d[0] = (y_[1] - y_[0]) / h0 - sl_;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
    a[i] = hl / 6.0;
    b[i] = (hl + hr) / 3.0;
    c[i] = hr / 6.0;
    d[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
  }
  const double hn = x_[n - 1] - x_[n - 2];
  a[n - 1] = hn / 6.0;
  b[n - 1] = hn / 3.0;
  d[n - 1] = sr_ - (y_[n - 1] - y_[n - 2]) / hn;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  m_.assign(n, 0.0);
  m_[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
}

std::size_t CubicSpline::interval(double t) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(k, x_.size() - 2);
}

double CubicSpline::value(double t) const {
  const std::size_t k = interval(t);
  const double h = x_[k + 1] - x_[k];
  const double A = (x_[k + 1] - t) / h, B = (t - x_[k]) / h;
  return A * y_[k] + B * y_[k + 1] +
         ((A * A * A - A) * m_[k] + (B * B * B - B) * m_[k + 1]) * h * h / 6.0;
}

double CubicSpline::d1(double t) const {
  const std::size_t k = interval(t);
  const double h = x_[k + 1] - x_[k];
  const double A = (x_[k + 1] - t) / h, B = (t - x_[k]) / h;
  return (y_[k + 1] - y_[k]) / h -
         (3.0 * A * A - 1.0) * h * m_[k] / 6.0 +
         (3.0 * B * B - 1.0) * h * m_[k + 1] / 6.0;
}

double CubicSpline::d2(double t) const {
  const std::size_t k = interval(t);
  const double h = x_[k + 1] - x_[k];
  const double A = (x_[k + 1] - t) / h, B = (t - x_[k]) / h;
  return A * m_[k] + B * m_[k + 1];
}

}  // namespace detshock
