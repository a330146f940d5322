#include "qdspdc/hom.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include <boost/math/tools/minima.hpp>

#include "qdspdc/errors.hpp"
#include "qdspdc/kernels.hpp"

namespace qdspdc {

std::string to_string(Polarization p) { return p == Polarization::kParallel ? "parallel" : "orthogonal"; }

Polarization parse_polarization(const std::string& s) {
  if (s == "parallel") return Polarization::kParallel;
  if (s == "orthogonal") return Polarization::kOrthogonal;
  throw ValidationError("unknown polarization '" + s + "' (expected parallel|orthogonal)");
}

CoincidenceDensity::CoincidenceDensity(TimeGrid grid, Eigen::MatrixXd values, Polarization pol)
    : grid_(grid), values_(std::move(values)), pol_(pol) {
  const double lo = values_.minCoeff();
  const double scale = std::max(values_.maxCoeff(), 1e-300);
  require(lo >= -1e-9 * scale - 1e-12, "coincidence density: negative values beyond rounding");
  values_ = values_.cwiseMax(0.0);
}

double CoincidenceDensity::total() const { return values_.sum() * grid_.dt * grid_.dt; }

TauDensity CoincidenceDensity::tau_marginal() const {
  const auto n = static_cast<double>(grid_.n);
  TauDensity d;
  d.tau0 = -(n - 1.0) * grid_.dt;
  d.dtau = grid_.dt;
  d.values = kernels::diagonal_sums(values_) * grid_.dt;
  return d;
}

TemporalAmplitude shift(const TemporalAmplitude& psi, double delay) {
  if (delay == 0.0) return psi;
  const auto m = filter_multiplier(SpectralFilter::none(), psi.grid(), delay);
  return {psi.grid(), spectral_multiply(psi.samples(), psi.grid(), m), false};
}

TwoTimeCoherence shift(const TwoTimeCoherence& g, double delay) {
  if (delay == 0.0) return g;
  const auto& grid = g.grid();
  const auto m = filter_multiplier(SpectralFilter::none(), grid, delay);
  const auto n = static_cast<Eigen::Index>(grid.n);
  MatrixXc half(n, n);
  for (Eigen::Index j = 0; j < n; ++j) half.col(j) = spectral_multiply(g.values().col(j), grid, m);
  MatrixXc adj = half.adjoint();
  MatrixXc out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) out.col(j) = spectral_multiply(adj.col(j), grid, m);
  return {grid, std::move(out)};
}

namespace {

void check_pair(const TwoTimeCoherence& a, const TwoTimeCoherence& b, double reflectivity) {
  require(a.grid().compatible(b.grid()), "coincidence density: grids do not match");
  require(reflectivity >= 0.0 && reflectivity <= 1.0, "reflectivity must lie in [0,1]");
}

}  // namespace

CoincidenceDensity coincidence_density(const TwoTimeCoherence& a, const TwoTimeCoherence& b, Polarization pol,
                                       double delay, double reflectivity) {
  check_pair(a, b, reflectivity);
  const auto bs = shift(b, delay);
  const double r = reflectivity, t = 1.0 - reflectivity;
  kernels::PairWeights w{t * t, r * r, pol == Polarization::kParallel ? -2.0 * r * t : 0.0};
  return {a.grid(), kernels::pair_density(a.values(), bs.values(), w), pol};
}

Eigen::MatrixXd same_port_density(const TwoTimeCoherence& a, const TwoTimeCoherence& b, Polarization pol, double delay,
                                  double reflectivity) {
  check_pair(a, b, reflectivity);
  const auto bs = shift(b, delay);
  const double rt = reflectivity * (1.0 - reflectivity);
  kernels::PairWeights w{0.5 * rt, 0.5 * rt, pol == Polarization::kParallel ? rt : 0.0};
  return kernels::pair_density(a.values(), bs.values(), w).cwiseMax(0.0);
}

double coalescence_probability(const TwoTimeCoherence& a, const TwoTimeCoherence& b) {
  require(a.grid().compatible(b.grid()), "coalescence: grids do not match");
  const double dt = a.grid().dt;
  const double p = kernels::trace_product(a.values(), b.values()).real() * dt * dt;
  return std::clamp(p, 0.0, 1.0);
}

double lifetime_from_linewidth(double linewidth) {
  require(linewidth > 0.0, "QD linewidth must be positive");
  return 1.0 / (2.0 * kPi * linewidth * kGhzPs);
}

TemporalAmplitude qd_pure_amplitude(double linewidth, const TimeGrid& grid) {
  const double t1 = lifetime_from_linewidth(linewidth);
  VectorXc v(static_cast<Eigen::Index>(grid.n));
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.at(i);
    v(static_cast<Eigen::Index>(i)) = t < 0.0 ? 0.0 : std::exp(-t / (2.0 * t1)) / std::sqrt(t1);
  }
  return {grid, std::move(v), false};
}

MaxCoalescence max_theoretical_coalescence(double qd_linewidth, const SpectralFilter& filter,
                                           const TemporalAmplitude& spdc_pulse,
                                           std::optional<Dephasing> include_dephasing) {
  const TimeGrid& grid = spdc_pulse.grid();
  const auto filtered = apply_filter(spdc_pulse, filter).state;
  const double dt = grid.dt;
  std::function<double(double)> overlap;
  std::optional<TwoTimeCoherence> qd;
  TemporalAmplitude pure_qd = qd_pure_amplitude(qd_linewidth, grid);
  double t1 = lifetime_from_linewidth(qd_linewidth);
  if (include_dephasing) {
    t1 = include_dephasing->t1;
    qd.emplace(qd_coherence(include_dephasing->t1, include_dephasing->t2, grid));
    overlap = [&](double d) {
      const VectorXc s = shift(filtered, d).samples();
      return (s.adjoint() * qd->values() * s)(0, 0).real() * dt * dt;
    };
  } else {
    require(grid.t0 - 0.5 * dt <= 0.0 && grid.end() >= 8.0 * t1, "max coalescence: grid shorter than 8 T1");
    overlap = [&](double d) {
      const VectorXc s = shift(filtered, d).samples();
      return std::norm(pure_qd.samples().dot(s) * dt);
    };
  }
  const double w = std::max(filtered.intensity_fwhm(), 4.0 * dt);
  const double lo = -2.0 * w, hi = 2.0 * t1 + 2.0 * w;
  const int steps = 120;
  double best_d = lo, best = -1.0;
  for (int k = 0; k <= steps; ++k) {
    const double d = lo + (hi - lo) * k / steps;
    const double v = overlap(d);
    if (v > best) {
      best = v;
      best_d = d;
    }
  }
  const double step = (hi - lo) / steps;
  auto neg = [&](double d) { return -overlap(d); };
  std::uintmax_t iters = 60;
  const auto r = boost::math::tools::brent_find_minima(neg, best_d - step, best_d + step, 40, iters);
  if (-r.second > best) return {std::clamp(-r.second, 0.0, 1.0), r.first};
  return {std::clamp(best, 0.0, 1.0), best_d};
}

HomModelCurve hom_dip_curve(const JointSpectralAmplitude& jsa, const std::vector<double>& delays,
                            const SpectralFilter& post_bs_filter) {
  require(jsa.signal_grid() == jsa.idler_grid(), "hom_dip_curve: signal and idler grids must be identical");
  require(jsa.phasematch().degenerate(), "hom_dip_curve: signal and idler must be degenerate to interfere");
  require(!delays.empty(), "hom_dip_curve: no delays");
  const auto& g = jsa.signal_grid();
  const auto n = static_cast<Eigen::Index>(g.n);
  Eigen::VectorXd w(n), nu(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    nu(k) = g.at(static_cast<std::size_t>(k));
    w(k) = post_bs_filter.cell_transmission(nu(k), g.dnu);
  }
  const Eigen::MatrixXd a2 = jsa.values().cwiseAbs2();
  // port-d frequency is the row of f(d, c) and the column of f(c, d)
  const double base = 0.25 * g.dnu * g.dnu * (w.dot(a2.rowwise().sum()) + w.dot(a2.colwise().sum().transpose()));
  const auto cross = kernels::dip_cross_terms(jsa.values(), w, nu, delays);
  HomModelCurve c;
  c.delays = delays;
  c.values.resize(delays.size());
  double mn = base;
  for (std::size_t k = 0; k < delays.size(); ++k) {
    c.values[k] = std::max(0.0, base - 0.5 * g.dnu * g.dnu * cross[k]);
    mn = std::min(mn, c.values[k]);
  }
  c.visibility = base > 0.0 ? 1.0 - mn / base : 0.0;
  return c;
}

TauDensity gaussian_smear(const TauDensity& density, double jitter_fwhm) {
  require(jitter_fwhm >= 0.0, "jitter must be non-negative");
  if (jitter_fwhm == 0.0) return density;
  const double sigma = jitter_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const auto half = static_cast<Eigen::Index>(std::ceil(7.0 * sigma / density.dtau));
  Eigen::VectorXd k(2 * half + 1);
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    const double x = static_cast<double>(i - half) * density.dtau;
    k(i) = std::exp(-0.5 * x * x / (sigma * sigma));
  }
  k /= k.sum();
  TauDensity out;
  out.dtau = density.dtau;
  out.tau0 = density.tau0 - static_cast<double>(half) * density.dtau;
  out.values = kernels::convolve_full(density.values, k);
  return out;
}

HomModelCurve smear_with_detector(const TauDensity& density, double jitter_fwhm, double bin,
                                  const std::vector<double>& centers, BinKernel kernel) {
  require(bin > 0.0, "bin width must be positive");
  const TauDensity s = gaussian_smear(density, jitter_fwhm);
  HomModelCurve c;
  c.jitter_fwhm = jitter_fwhm;
  c.delays = centers;
  c.values.assign(centers.size(), 0.0);
  const double h = s.dtau;
  for (std::size_t b = 0; b < centers.size(); ++b) {
    const double reach = kernel == BinKernel::kBox ? 0.5 * bin : bin;
    const auto k0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor((centers[b] - reach - s.tau0) / h)) - 1);
    const auto k1 = std::min<Eigen::Index>(s.values.size() - 1,
                                           static_cast<Eigen::Index>(std::ceil((centers[b] + reach - s.tau0) / h)) + 1);
    double acc = 0.0;
    for (Eigen::Index k = k0; k <= k1; ++k) {
      const double x = s.at(k);
      double wgt;
      if (kernel == BinKernel::kBox) {
        const double lo = std::max(x - 0.5 * h, centers[b] - 0.5 * bin);
        const double hi = std::min(x + 0.5 * h, centers[b] + 0.5 * bin);
        wgt = hi > lo ? (hi - lo) : 0.0;
      } else {
        wgt = std::max(0.0, 1.0 - std::abs(x - centers[b]) / bin) * h;
      }
      acc += wgt * s.values(k);
    }
    c.values[b] = acc;
  }
  return c;
}

TauDensity hom_peak_density(double t1, double t2, const TemporalAmplitude& spdc, double delay, Polarization pol,
                            double reflectivity) {
  const auto qd = qd_coherence(t1, t2, spdc.grid());
  const auto s = TwoTimeCoherence::pure(shift(spdc, delay));
  return coincidence_density(qd, s, pol, 0.0, reflectivity).tau_marginal();
}

void write_curve_csv(const HomModelCurve& c, std::ostream& os, const std::string& xname) {
  os << xname << ",value\n";
  for (std::size_t k = 0; k < c.delays.size(); ++k) os << c.delays[k] << ',' << c.values[k] << '\n';
}

}  // namespace qdspdc
