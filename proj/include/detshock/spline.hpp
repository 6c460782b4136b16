#ifndef DETSHOCK_SPLINE_HPP_
#define DETSHOCK_SPLINE_HPP_

#include <vector>

namespace detshock {

// Clamped cubic spline on strictly increasing, possibly nonuniform nodes.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y, double slope_left,
              double slope_right);

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  double slope_left() const { return sl_; }
  double slope_right() const { return sr_; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t interval(double t) const;
  std::vector<double> x_, y_, m_;  // m_: second derivatives at nodes
  double sl_ = 0.0, sr_ = 0.0;
};

}  // namespace detshock

#endif  // DETSHOCK_SPLINE_HPP_
