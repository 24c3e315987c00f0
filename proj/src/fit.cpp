#include "hypolab/fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hypolab {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matching samples");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.n = n;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.residual_rms = std::sqrt(ss / n);
  return f;
}

LineFit fit_power_law(const std::vector<double>& r, const std::vector<double>& v, double floor) {
  std::vector<double> lx(r.size()), ly(v.size());
  for (size_t i = 0; i < r.size(); ++i) {
    lx[i] = std::log(r[i]);
    ly[i] = std::log(std::max(v[i], floor));
  }
  return fit_line(lx, ly);
}

StretchedExpFit fit_stretched_exp(const std::vector<double>& lam, const std::vector<double>& v,
                                  double b_min, double b_max, int b_steps) {
  if (lam.size() != v.size() || lam.size() < 3)
    throw std::invalid_argument("fit_stretched_exp: need >= 3 samples");
  StretchedExpFit best;
  best.residual_rms = std::numeric_limits<double>::infinity();
  std::vector<double> ly(v.size());
  for (size_t i = 0; i < v.size(); ++i) ly[i] = std::log(std::max(v[i], 1e-300));
  for (int k = 0; k <= b_steps; ++k) {
    const double b = b_min + (b_max - b_min) * k / b_steps;
    std::vector<double> x(lam.size());
    for (size_t i = 0; i < lam.size(); ++i) x[i] = std::pow(lam[i], b);
    LineFit f = fit_line(x, ly);
    if (f.residual_rms < best.residual_rms) {
      best.kappa = -f.slope;
      best.b = b;
      best.log_c = f.intercept;
      best.residual_rms = f.residual_rms;
    }
  }
  return best;
}

}  // namespace hypolab
