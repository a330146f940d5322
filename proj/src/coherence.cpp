#include "qdspdc/coherence.hpp"

#include <cmath>
#include <ostream>

#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/FFT>

#include "qdspdc/errors.hpp"
#include "qdspdc/kernels.hpp"

namespace qdspdc {

namespace {

double phase(double nu_ghz, double t_ps) { return 2 * kPi * nu_ghz * t_ps * kGhzPs; }

std::vector<double> grid_times(const TimeGrid& g) {
  std::vector<double> t(g.n);
  for (std::size_t i = 0; i < g.n; ++i) t[i] = g.at(i);
  return t;
}

}  // namespace

TemporalAmplitude::TemporalAmplitude(TimeGrid grid, VectorXc samples, bool check_span)
    : grid_(grid), samples_(std::move(samples)) {
  require(grid_.dt > 0.0, "amplitude: dt must be positive");
  require(static_cast<std::size_t>(samples_.size()) == grid_.n, "amplitude: sample count does not match grid");
  const double nrm = std::sqrt(samples_.squaredNorm() * grid_.dt);
  require(nrm > 0.0, "amplitude: zero wavepacket");
  samples_ /= nrm;
  if (check_span) {
    const double w = intensity_fwhm();
    require(grid_.span() >= 8.0 * w, "amplitude: grid span shorter than 8x the FWHM");
  }
}

double TemporalAmplitude::norm() const { return samples_.squaredNorm() * grid_.dt; }

double TemporalAmplitude::intensity_fwhm() const {
  std::vector<double> y(grid_.n);
  for (std::size_t i = 0; i < grid_.n; ++i) y[i] = std::norm(samples_(static_cast<Eigen::Index>(i)));
  return sampled_fwhm(grid_times(grid_), y);
}

TwoTimeCoherence::TwoTimeCoherence(TimeGrid grid, MatrixXc values) : grid_(grid), values_(std::move(values)) {
  require(values_.rows() == values_.cols() && static_cast<std::size_t>(values_.rows()) == grid_.n,
          "coherence: matrix does not match grid");
  values_ = 0.5 * (values_ + values_.adjoint()).eval();
  const double tr = values_.diagonal().real().sum() * grid_.dt;
  require(tr > 0.0 && std::isfinite(tr), "coherence: non-positive trace");
  values_ /= tr;
}

TwoTimeCoherence TwoTimeCoherence::pure(const TemporalAmplitude& psi) {
  return {psi.grid(), psi.samples() * psi.samples().adjoint()};
}

double TwoTimeCoherence::trace() const { return values_.diagonal().real().sum() * grid_.dt; }

Eigen::VectorXd TwoTimeCoherence::intensity() const { return values_.diagonal().real(); }

std::pair<double, double> TwoTimeCoherence::eigen_range() const {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(values_ * grid_.dt, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

void TwoTimeCoherence::write_csv(std::ostream& os) const {
  os << "t_ps,tp_ps,re_G,im_G\n";
  for (std::size_t i = 0; i < grid_.n; ++i)
    for (std::size_t j = 0; j < grid_.n; ++j) {
      const cplx v = values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      os << grid_.at(i) << ',' << grid_.at(j) << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

std::string to_string(FilterShape s) {
  switch (s) {
    case FilterShape::kRect: return "rect";
    case FilterShape::kLorentzian: return "lorentzian";
    case FilterShape::kGaussian: return "gaussian";
    case FilterShape::kNone: return "none";
  }
  return "none";
}

FilterShape parse_filter_shape(const std::string& s) {
  if (s == "rect" || s == "rect-slit") return FilterShape::kRect;
  if (s == "lorentzian" || s == "lorentzian-cavity") return FilterShape::kLorentzian;
  if (s == "gaussian" || s == "gaussian-grating") return FilterShape::kGaussian;
  if (s == "none") return FilterShape::kNone;
  throw ValidationError("unknown filter shape '" + s + "'");
}

SpectralFilter::SpectralFilter(FilterShape s, double f, double detuning) : shape(s), fwhm(f), center_detuning(detuning) {
  if (shape != FilterShape::kNone) require(fwhm > 0.0 && std::isfinite(fwhm), "filter: fwhm must be positive");
}

cplx SpectralFilter::transfer(double nu) const {
  const double x = nu - center_detuning;
  switch (shape) {
    case FilterShape::kNone: return 1.0;
    case FilterShape::kRect: return std::abs(x) <= 0.5 * fwhm ? 1.0 : 0.0;
    case FilterShape::kGaussian: return std::exp(-2.0 * std::log(2.0) * x * x / (fwhm * fwhm));
    case FilterShape::kLorentzian: return 1.0 / cplx(1.0, -2.0 * x / fwhm);
  }
  return 1.0;
}

double SpectralFilter::cell_transmission(double nu, double w) const {
  if (shape != FilterShape::kRect) return std::norm(transfer(nu));
  const double lo = std::max(nu - 0.5 * w, center_detuning - 0.5 * fwhm);
  const double hi = std::min(nu + 0.5 * w, center_detuning + 0.5 * fwhm);
  return hi > lo ? (hi - lo) / w : 0.0;
}

cplx SpectralFilter::cell_amplitude(double nu, double w) const {
  if (shape != FilterShape::kRect) return transfer(nu);
  return std::sqrt(cell_transmission(nu, w));
}

TwoTimeCoherence qd_coherence(double t1, double t2, const TimeGrid& grid) {
  require(t1 > 0.0 && t2 > 0.0, "qd_coherence: T1, T2 must be positive");
  require(t2 <= 2.0 * t1 * (1.0 + 1e-12), "qd_coherence: T2 > 2 T1 is unphysical");
  require(grid.t0 - 0.5 * grid.dt <= 0.0 && grid.end() >= 8.0 * t1,
          "qd_coherence: grid must start before 0 and extend beyond 8 T1");
  const double gd = std::max(0.0, 1.0 / t2 - 0.5 / t1);
  const auto n = static_cast<Eigen::Index>(grid.n);
  MatrixXc g = MatrixXc::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double tj = grid.at(static_cast<std::size_t>(j));
    if (tj < 0.0) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ti = grid.at(static_cast<std::size_t>(i));
      if (ti < 0.0) continue;
      g(i, j) = std::exp(-(ti + tj) / (2.0 * t1) - gd * std::abs(ti - tj)) / t1;
    }
  }
  return {grid, std::move(g)};
}

VectorXc to_spectrum(const VectorXc& psi, const TimeGrid& grid) {
  Eigen::FFT<double> fft;
  VectorXc out;
  fft.inv(out, psi);
  const double scale = grid.dt * static_cast<double>(grid.n);
  for (Eigen::Index k = 0; k < out.size(); ++k)
    out(k) *= scale * std::polar(1.0, phase(grid.dft_frequency(static_cast<std::size_t>(k)), grid.t0));
  return out;
}

VectorXc from_spectrum(const VectorXc& spec, const TimeGrid& grid) {
  VectorXc tmp(spec.size());
  for (Eigen::Index k = 0; k < spec.size(); ++k)
    tmp(k) = spec(k) * std::polar(1.0, -phase(grid.dft_frequency(static_cast<std::size_t>(k)), grid.t0));
  Eigen::FFT<double> fft;
  VectorXc out;
  fft.fwd(out, tmp);
  return out / (grid.dt * static_cast<double>(grid.n));
}

VectorXc spectral_multiply(const VectorXc& psi, const TimeGrid& grid, const VectorXc& mult) {
  Eigen::FFT<double> fft;
  VectorXc spec;
  fft.inv(spec, psi);
  spec = spec.cwiseProduct(mult);
  VectorXc out;
  fft.fwd(out, spec);
  (void)grid;
  return out;
}

VectorXc filter_multiplier(const SpectralFilter& f, const TimeGrid& grid, double delay) {
  VectorXc m(static_cast<Eigen::Index>(grid.n));
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double nu = grid.dft_frequency(k);
    m(static_cast<Eigen::Index>(k)) = f.transfer(nu) * std::polar(1.0, phase(nu, delay));
  }
  return m;
}

TemporalAmplitude filter_amplitude_response(const SpectralFilter& filter, const TimeGrid& grid) {
  require(!filter.is_none(), "filter_amplitude_response: no filter given");
  require(grid.dt <= 0.05 / (filter.fwhm * kGhzPs) * (1.0 + 1e-12),
          "filter_amplitude_response: grid step does not resolve the filter (need dt <= 0.05/fwhm)");
  VectorXc h(static_cast<Eigen::Index>(grid.n));
  for (std::size_t k = 0; k < grid.n; ++k) h(static_cast<Eigen::Index>(k)) = filter.transfer(grid.dft_frequency(k));
  return {grid, from_spectrum(h, grid)};
}

Filtered<TemporalAmplitude> apply_filter(const TemporalAmplitude& in, const SpectralFilter& filter) {
  if (filter.is_none()) return {in, 1.0};
  const auto m = filter_multiplier(filter, in.grid());
  VectorXc out = spectral_multiply(in.samples(), in.grid(), m);
  const double frac = out.squaredNorm() * in.grid().dt;
  if (!(frac >= 1e-9)) throw PhotonRejected("apply_filter: photon fully rejected by the filter");
  return {TemporalAmplitude(in.grid(), std::move(out), false), std::min(frac, 1.0)};
}

Filtered<TwoTimeCoherence> apply_filter(const TwoTimeCoherence& in, const SpectralFilter& filter) {
  if (filter.is_none()) return {in, 1.0};
  const auto& grid = in.grid();
  const auto m = filter_multiplier(filter, grid);
  const auto n = static_cast<Eigen::Index>(grid.n);
  // U G U^dagger: filter the columns, then the columns of the adjoint.
  MatrixXc half(n, n);
  for (Eigen::Index j = 0; j < n; ++j) half.col(j) = spectral_multiply(in.values().col(j), grid, m);
  MatrixXc adj = half.adjoint();
  MatrixXc out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) out.col(j) = spectral_multiply(adj.col(j), grid, m);
  const double frac = out.diagonal().real().sum() * grid.dt;
  if (!(frac >= 1e-9)) throw PhotonRejected("apply_filter: photon fully rejected by the filter");
  return {TwoTimeCoherence(grid, std::move(out)), std::min(frac, 1.0)};
}

double sinc_half_power_root() {
  static const double root = [] {
    auto g = [](double x) { const double s = std::sin(x) / x; return s * s - 0.5; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve(g, 0.5, 2.5, tol, iters);
    return 0.5 * (r.first + r.second);
  }();
  return root;
}

double transform_limit(double fwhm_ghz, FilterShape shape) {
  require(fwhm_ghz > 0.0, "transform_limit: fwhm must be positive");
  const double f = fwhm_ghz * kGhzPs;  // 1/ps
  switch (shape) {
    case FilterShape::kGaussian: return 2.0 * std::log(2.0) / kPi / f;
    case FilterShape::kLorentzian: return std::log(2.0) / (2.0 * kPi * f);
    case FilterShape::kRect: return 2.0 * sinc_half_power_root() / (kPi * f);
    case FilterShape::kNone: break;
  }
  throw ValidationError("transform_limit: no filter shape");
}

double purity(const TwoTimeCoherence& g) {
  const double dt = g.grid().dt;
  return kernels::trace_product(g.values(), g.values()).real() * dt * dt;
}

TemporalAmplitude gaussian_pulse(double fwhm_ps, const TimeGrid& grid, double center) {
  require(fwhm_ps > 0.0, "gaussian_pulse: fwhm must be positive");
  VectorXc v(static_cast<Eigen::Index>(grid.n));
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.at(i) - center;
    v(static_cast<Eigen::Index>(i)) = std::exp(-2.0 * std::log(2.0) * x * x / (fwhm_ps * fwhm_ps));
  }
  return {grid, std::move(v)};
}

}  // namespace qdspdc
