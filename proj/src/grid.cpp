#include "hypolab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace hypolab {

namespace {

bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

/// Decode a row-major flat index into per-axis indices.
void unflatten(size_t flat, int nu, int points, int* out) {
  for (int d = nu - 1; d >= 0; --d) {
    out[d] = static_cast<int>(flat % points);
    flat /= points;
  }
}

void run_fft(const GridSpec& spec, const std::complex<double>* in, std::complex<double>* out,
             int sign) {
  const int nu = spec.dimension();
  std::vector<int> n(nu, spec.points);
  // FFTW_ESTIMATE keeps planning deterministic and leaves the input intact.
  fftw_plan plan = fftw_plan_dft(
      nu, n.data(),
      reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
      reinterpret_cast<fftw_complex*>(out), sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  if (!plan) throw std::runtime_error("fftw planning failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

/// (-1)^(j_1 + ... + j_nu) phase that shifts the grid origin to -L.
double center_phase(const GridSpec& spec, size_t flat) {
  int idx[16];
  unflatten(flat, spec.dimension(), spec.points, idx);
  int s = 0;
  for (int d = 0; d < spec.dimension(); ++d) s += idx[d];
  return (s & 1) ? -1.0 : 1.0;
}

}  // namespace

size_t GridSpec::size() const {
  size_t s = 1;
  for (int d = 0; d < dimension(); ++d) s *= static_cast<size_t>(points);
  return s;
}

double GridSpec::dxi(int d) const { return std::numbers::pi / half_width[d]; }

double GridSpec::cell_volume() const {
  double v = 1;
  for (int d = 0; d < dimension(); ++d) v *= spacing(d);
  return v;
}

double GridSpec::freq_cell_volume() const {
  double v = 1;
  for (int d = 0; d < dimension(); ++d) v *= dxi(d);
  return v;
}

std::vector<double> GridSpec::point_at(size_t flat) const {
  const int nu = dimension();
  int idx[16];
  unflatten(flat, nu, points, idx);
  std::vector<double> x(nu);
  for (int d = 0; d < nu; ++d) x[d] = -half_width[d] + idx[d] * spacing(d);
  return x;
}

std::vector<double> GridSpec::freq_at(size_t flat) const {
  const int nu = dimension();
  int idx[16];
  unflatten(flat, nu, points, idx);
  std::vector<double> xi(nu);
  for (int d = 0; d < nu; ++d) {
    int j = idx[d] < points / 2 ? idx[d] : idx[d] - points;
    xi[d] = j * dxi(d);
  }
  return xi;
}

void GridSpec::validate() const {
  if (split.n < 0 || split.m < 0 || dimension() < 1 || dimension() > 16)
    throw std::invalid_argument("GridSpec: bad split");
  if (!power_of_two(points) || points < 8)
    throw std::invalid_argument("GridSpec: points must be a power of two >= 8");
  if (static_cast<int>(half_width.size()) != dimension())
    throw std::invalid_argument("GridSpec: half_width size mismatch");
  for (double L : half_width)
    if (!(L > 0)) throw std::invalid_argument("GridSpec: half-widths must be positive");
}

std::string GridSpec::to_json() const {
  nlohmann::json j;
  j["split"] = {{"n", split.n}, {"m", split.m}};
  j["points"] = points;
  j["half_width"] = half_width;
  return j.dump();
}

GridSpec GridSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GridSpec s;
  s.split = {j["split"]["n"].get<int>(), j["split"]["m"].get<int>()};
  s.points = j["points"].get<int>();
  s.half_width = j["half_width"].get<std::vector<double>>();
  s.validate();
  return s;
}

bool GridSpec::operator==(const GridSpec& o) const {
  return split.n == o.split.n && split.m == o.split.m && points == o.points &&
         half_width == o.half_width;
}

GridFunction::GridFunction(GridSpec spec, std::vector<std::complex<double>> values)
    : spec_(std::move(spec)), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.size())
    throw std::invalid_argument("GridFunction: value count mismatch");
}

GridFunction GridFunction::zeros(const GridSpec& spec) {
  return GridFunction(spec, std::vector<std::complex<double>>(spec.size()));
}

GridFunction GridFunction::sample(
    const GridSpec& spec,
    const std::function<std::complex<double>(const std::vector<double>&)>& f) {
  std::vector<std::complex<double>> v(spec.size());
  for (size_t k = 0; k < v.size(); ++k) v[k] = f(spec.point_at(k));
  return GridFunction(spec, std::move(v));
}

bool GridFunction::is_zero() const {
  for (const auto& z : values_)
    if (z != std::complex<double>(0.0, 0.0)) return false;
  return true;
}

std::vector<std::complex<double>> GridFunction::spectrum() const {
  // uhat_j = h^nu * (-1)^{sum j_d} * DFT(u)_j: the checkerboard phase on the
  // output implements the grid origin at -L (e^{i pi j} per axis).
  const size_t n = values_.size();
  std::vector<std::complex<double>> out(n);
  run_fft(spec_, values_.data(), out.data(), FFTW_FORWARD);
  const double scale = spec_.cell_volume();
  for (size_t j = 0; j < n; ++j) out[j] *= scale * center_phase(spec_, j);
  return out;
}

GridFunction GridFunction::from_spectrum(const GridSpec& spec,
                                         const std::vector<std::complex<double>>& spectrum) {
  if (spectrum.size() != spec.size())
    throw std::invalid_argument("from_spectrum: size mismatch");
  const size_t n = spectrum.size();
  std::vector<std::complex<double>> tmp(n);
  for (size_t j = 0; j < n; ++j) tmp[j] = spectrum[j] * center_phase(spec, j);
  std::vector<std::complex<double>> out(n);
  run_fft(spec, tmp.data(), out.data(), FFTW_BACKWARD);
  const double scale =
      spec.freq_cell_volume() / std::pow(2.0 * std::numbers::pi, spec.dimension());
  for (size_t k = 0; k < n; ++k) out[k] *= scale;
  return GridFunction(spec, std::move(out));
}

GridFunction GridFunction::multiplier(
    const std::function<std::complex<double>(const std::vector<double>&)>& m) const {
  auto sp = spectrum();
  for (size_t j = 0; j < sp.size(); ++j) sp[j] *= m(spec_.freq_at(j));
  return from_spectrum(spec_, sp);
}

GridFunction GridFunction::apply_symbol(const SymbolPoly& P) const {
  if (P.dimension() != spec_.dimension())
    throw std::invalid_argument("apply_symbol: dimension mismatch");
  return multiplier([&P](const std::vector<double>& xi) {
    std::vector<std::complex<double>> z(xi.begin(), xi.end());
    return P.evaluate(z);
  });
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  if (!(spec_ == o.spec_)) throw std::invalid_argument("GridFunction: spec mismatch");
  auto v = values_;
  for (size_t k = 0; k < v.size(); ++k) v[k] += o.values_[k];
  return GridFunction(spec_, std::move(v));
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  if (!(spec_ == o.spec_)) throw std::invalid_argument("GridFunction: spec mismatch");
  auto v = values_;
  for (size_t k = 0; k < v.size(); ++k) v[k] -= o.values_[k];
  return GridFunction(spec_, std::move(v));
}

GridFunction GridFunction::scaled(std::complex<double> c) const {
  auto v = values_;
  for (auto& z : v) z *= c;
  return GridFunction(spec_, std::move(v));
}

double GridFunction::l2_physical() const {
  double s = 0;
  for (const auto& z : values_) s += std::norm(z);
  return std::sqrt(s * spec_.cell_volume());
}

double GridFunction::max_abs() const {
  double s = 0;
  for (const auto& z : values_) s = std::max(s, std::abs(z));
  return s;
}

void GridFunction::save(const std::string& path) const {
  static_assert(sizeof(std::complex<double>) == 16);
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("save: cannot open " + path);
  bin.write(reinterpret_cast<const char*>(values_.data()),
            static_cast<std::streamsize>(values_.size() * sizeof(std::complex<double>)));
  if (!bin) throw std::runtime_error("save: write failed for " + path);
  std::ofstream side(path + ".json");
  side << spec_.to_json() << "\n";
  if (!side) throw std::runtime_error("save: sidecar write failed for " + path);
}

GridFunction GridFunction::load(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw std::runtime_error("load: missing sidecar " + path + ".json");
  std::string text((std::istreambuf_iterator<char>(side)), std::istreambuf_iterator<char>());
  GridSpec spec = GridSpec::from_json(text);
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("load: cannot open " + path);
  std::vector<std::complex<double>> v(spec.size());
  bin.read(reinterpret_cast<char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(std::complex<double>)));
  if (bin.gcount() != static_cast<std::streamsize>(v.size() * sizeof(std::complex<double>)))
    throw std::runtime_error("load: truncated binary " + path);
  return GridFunction(spec, std::move(v));
}

void GridFunction::write_csv_slice(const std::string& path, const std::vector<int>& axes,
                                   const std::vector<double>& pin) const {
  const int nu = spec_.dimension();
  if (axes.empty() || axes.size() > 2)
    throw std::invalid_argument("write_csv_slice: need 1 or 2 axes");
  if (static_cast<int>(pin.size()) != nu)
    throw std::invalid_argument("write_csv_slice: pin size must equal dimension");
  std::vector<int> fixed(nu);
  for (int d = 0; d < nu; ++d) {
    double t = (pin[d] + spec_.half_width[d]) / spec_.spacing(d);
    fixed[d] = std::clamp(static_cast<int>(std::lround(t)), 0, spec_.points - 1);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv_slice: cannot open " + path);
  char buf[128];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::vector<int> idx = fixed;
  auto flat_of = [&](const std::vector<int>& ii) {
    size_t f = 0;
    for (int d = 0; d < nu; ++d) f = f * spec_.points + ii[d];
    return f;
  };
  if (axes.size() == 1) {
    out << "x,re,im\n";
    for (int k = 0; k < spec_.points; ++k) {
      idx[axes[0]] = k;
      size_t f = flat_of(idx);
      auto x = spec_.point_at(f);
      auto z = values_[f];
      out << fmt(x[axes[0]]) << "," << fmt(z.real()) << "," << fmt(z.imag()) << "\n";
    }
  } else {
    out << "x,y,re,im\n";
    for (int a = 0; a < spec_.points; ++a)
      for (int b = 0; b < spec_.points; ++b) {
        idx[axes[0]] = a;
        idx[axes[1]] = b;
        size_t f = flat_of(idx);
        auto x = spec_.point_at(f);
        auto z = values_[f];
        out << fmt(x[axes[0]]) << "," << fmt(x[axes[1]]) << "," << fmt(z.real()) << ","
            << fmt(z.imag()) << "\n";
      }
  }
}

}  // namespace hypolab
