#ifndef HYPOLAB_FIT_HPP
#define HYPOLAB_FIT_HPP

#include <vector>

namespace hypolab {

/// Least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;  // RMS of y - fit
  int n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Fit v = C * r^slope through log-log regression.  Non-positive samples are
/// clamped to `floor` before taking logs.
LineFit fit_power_law(const std::vector<double>& r, const std::vector<double>& v,
                      double floor = 1e-300);

/// Fit v = C * exp(-kappa * lam^b) by scanning b over a grid and solving the
/// linear subproblem; returns the best (kappa, b) with the log-residual.
struct StretchedExpFit {
  double kappa = 0.0;
  double b = 0.0;
  double log_c = 0.0;
  double residual_rms = 0.0;
};

StretchedExpFit fit_stretched_exp(const std::vector<double>& lam, const std::vector<double>& v,
                                  double b_min = 0.05, double b_max = 1.0, int b_steps = 96);

}  // namespace hypolab

#endif
