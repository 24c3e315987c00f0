#ifndef HYPOLAB_GRID_HPP
#define HYPOLAB_GRID_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hypolab/symbol.hpp"

namespace hypolab {

/// Uniform periodic grid on the box prod_d [-L_d, L_d), N points per axis.
/// Nodes x_k = -L + k h with h = 2L/N; dual frequencies xi_j = j*pi/L for
/// j in [-N/2, N/2) so that dxi * h * N = 2*pi.
struct GridSpec {
  VariableSplit split{1, 0};
  int points = 8;                   // per axis, power of two, >= 8
  std::vector<double> half_width;   // one entry per axis

  int dimension() const { return split.n + split.m; }
  size_t size() const;
  double spacing(int d) const { return 2.0 * half_width[d] / points; }
  double dxi(int d) const;
  /// Physical cell volume h^nu and frequency cell volume (dxi)^nu.
  double cell_volume() const;
  double freq_cell_volume() const;

  std::vector<double> point_at(size_t flat) const;
  /// Signed frequency vector of the flat spectral index (FFT layout).
  std::vector<double> freq_at(size_t flat) const;

  void validate() const;
  std::string to_json() const;
  static GridSpec from_json(const std::string& text);
  bool operator==(const GridSpec& o) const;
};

/// Immutable complex samples over a GridSpec, row-major.
class GridFunction {
 public:
  GridFunction(GridSpec spec, std::vector<std::complex<double>> values);
  static GridFunction zeros(const GridSpec& spec);
  static GridFunction sample(const GridSpec& spec,
                             const std::function<std::complex<double>(const std::vector<double>&)>& f);

  const GridSpec& spec() const { return spec_; }
  const std::vector<std::complex<double>>& values() const { return values_; }
  std::complex<double> at(size_t flat) const { return values_[flat]; }
  bool is_zero() const;

  /// Forward transform: uhat_j = h^nu * sum_k u_k exp(-i x_k . xi_j),
  /// returned in FFT layout (use spec().freq_at to decode indices).
  std::vector<std::complex<double>> spectrum() const;
  /// Inverse of `spectrum`.
  static GridFunction from_spectrum(const GridSpec& spec,
                                    const std::vector<std::complex<double>>& spectrum);

  /// Apply a Fourier multiplier m(xi).
  GridFunction multiplier(
      const std::function<std::complex<double>(const std::vector<double>&)>& m) const;
  /// Apply a constant-coefficient symbol as a Fourier multiplier P(xi).
  GridFunction apply_symbol(const SymbolPoly& P) const;

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  GridFunction scaled(std::complex<double> c) const;

  double l2_physical() const;  // sqrt(h^nu * sum |u|^2)
  double max_abs() const;

  /// Flat little-endian complex-double binary next to a JSON sidecar
  /// (path + ".json") carrying the GridSpec.
  void save(const std::string& path) const;
  static GridFunction load(const std::string& path);

  /// CSV slice along one or two axes (other coordinates pinned to the node
  /// nearest the given values); 17 significant digits.
  void write_csv_slice(const std::string& path, const std::vector<int>& axes,
                       const std::vector<double>& pin) const;

 private:
  GridSpec spec_;
  std::vector<std::complex<double>> values_;
};

}  // namespace hypolab

#endif
