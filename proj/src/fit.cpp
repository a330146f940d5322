#include "qdspdc/fit.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "qdspdc/errors.hpp"
#include "qdspdc/kernels.hpp"
#include "qdspdc/simkit.hpp"

namespace qdspdc {

namespace {

double sigma_of(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

// Probability mass of a unit exponential lobe starting at `a` (decaying away
// from it in direction `dir`) inside [lo, hi).
double lobe_mass(double lo, double hi, double a, double t1, int dir) {
  if (dir > 0) {
    if (hi <= a) return 0.0;
    const double l = std::max(lo, a);
    return std::exp(-(l - a) / t1) - std::exp(-(hi - a) / t1);
  }
  if (lo >= a) return 0.0;
  const double h = std::min(hi, a);
  return std::exp(-(a - h) / t1) - std::exp(-(a - lo) / t1);
}

// Kernel resampled on steps of dt around its mean, on offsets -J..J, trimmed and
// normalized to unit sum.
Eigen::VectorXd resample_kernel(const TauDensity& k, double dt) {
  const auto n = k.values.size();
  require(n > 1, "arrival kernel: needs at least two samples");
  double tot = 0, mean = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    tot += k.values(i);
    mean += k.values(i) * k.at(i);
  }
  require(tot > 0.0, "arrival kernel: no weight");
  mean /= tot;
  const double peak = k.values.maxCoeff();
  Eigen::Index a = 0, b = n - 1;
  while (a < b && k.values(a) < 1e-6 * peak) ++a;
  while (b > a && k.values(b) < 1e-6 * peak) --b;
  const double reach = std::max(mean - k.at(a), k.at(b) - mean);
  const auto jmax = static_cast<Eigen::Index>(std::ceil(reach / dt));
  Eigen::VectorXd out(2 * jmax + 1);
  for (Eigen::Index j = -jmax; j <= jmax; ++j) {
    const double x = (mean + static_cast<double>(j) * dt - k.tau0) / k.dtau;
    const auto i = static_cast<Eigen::Index>(std::floor(x));
    const double f = x - static_cast<double>(i);
    const double v0 = (i >= 0 && i < n) ? k.values(i) : 0.0;
    const double v1 = (i + 1 >= 0 && i + 1 < n) ? k.values(i + 1) : 0.0;
    out(j + jmax) = std::max(0.0, (1.0 - f) * v0 + f * v1);
  }
  return out / out.sum();
}

std::vector<double> neyman_weights(const CoincidenceHistogram& h) {
  std::vector<double> w(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) w[i] = 1.0 / std::max<double>(static_cast<double>(h.counts[i]), 1.0);
  return w;
}

struct LifetimeFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const CoincidenceHistogram* h;
  double jitter, bin;
  LifetimeFitOptions opt;
  std::vector<double> w;
  int np;

  int inputs() const { return np; }
  int values() const { return static_cast<int>(h->size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const double t1 = std::abs(x(1)) + 1e-3;
    const double sep = np > 3 ? x(3) : 0.0;
    const auto m = lifetime_model(*h, jitter, bin, opt, x(0), t1, x(2), sep);
    for (std::size_t i = 0; i < h->size(); ++i)
      f(static_cast<Eigen::Index>(i)) = (static_cast<double>(h->counts[i]) - m[i]) * std::sqrt(w[i]);
    return 0;
  }
};

}  // namespace

std::vector<double> lifetime_model(const CoincidenceHistogram& h, double jitter_fwhm, double bin,
                                   const LifetimeFitOptions& opt, double amplitude, double t1, double center,
                                   double separation) {
  require(!h.counts.empty(), "lifetime model: empty histogram");
  const double sigma = sigma_of(jitter_fwhm);
  const double dt = std::min(2.0, bin / 16.0);
  std::vector<double> centers = h.centers();
  for (auto& c : centers) c += opt.kernel_shift;
  const double lo = centers.front() - bin - 8.0 * sigma - dt;
  const double hi = centers.back() + bin + 8.0 * sigma + dt;
  const auto n = static_cast<Eigen::Index>(std::ceil((hi - lo) / dt));
  TauDensity d;
  d.tau0 = lo + 0.5 * dt;
  d.dtau = dt;
  Eigen::VectorXd up(n), down(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = lo + static_cast<double>(k) * dt, b = a + dt;
    if (opt.profile == LifetimeProfile::kOneSided) {
      up(k) = lobe_mass(a, b, center, t1, +1);
      down(k) = 0.0;
    } else {
      up(k) = 0.5 * lobe_mass(a, b, center + separation, t1, +1);
      down(k) = 0.5 * lobe_mass(a, b, center - separation, t1, -1);
    }
  }
  if (opt.arrival_kernel) {
    // tau = t2 - t1: the partner photon enters with a minus sign in the lobe decaying to +tau
    const Eigen::VectorXd k = resample_kernel(*opt.arrival_kernel, dt);
    const Eigen::VectorXd kr = k.reverse();
    d.tau0 -= static_cast<double>((k.size() - 1) / 2) * dt;
    up = kernels::convolve_full(up, kr);
    down = kernels::convolve_full(down, k);
  }
  d.values = (up + down) * (amplitude / dt);
  return smear_with_detector(d, jitter_fwhm, bin, centers, opt.kernel).values;
}

LifetimeFit fit_lifetime(const CoincidenceHistogram& h, double jitter_fwhm, double bin, const LifetimeFitOptions& opt) {
  std::size_t populated = 0;
  double tot = 0, mean = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h.counts[i] > 0) ++populated;
    tot += static_cast<double>(h.counts[i]);
    mean += static_cast<double>(h.counts[i]) * h.center(i);
  }
  require(populated >= 10, "fit_lifetime: need at least 10 populated bins");
  mean /= tot;
  double var = 0;
  for (std::size_t i = 0; i < h.size(); ++i) var += static_cast<double>(h.counts[i]) * std::pow(h.center(i) - mean, 2);
  var /= tot;
  const double sigma = sigma_of(jitter_fwhm);
  const double excess = std::max(var - sigma * sigma - bin * bin / 6.0, 400.0);
  const bool two = opt.profile == LifetimeProfile::kTwoSided;
  const double t1_0 = two ? std::sqrt(excess / 2.0) : std::sqrt(excess);
  const int np = two && opt.fit_separation ? 4 : 3;

  LifetimeFunctor f{&h, jitter_fwhm, bin, opt, neyman_weights(h), np};
  Eigen::VectorXd x(np);
  x(0) = tot;
  x(1) = t1_0;
  x(2) = two ? mean : mean - t1_0 - opt.kernel_shift;
  if (np == 4) x(3) = 0.0;
  Eigen::NumericalDiff<LifetimeFunctor, Eigen::Central> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LifetimeFunctor, Eigen::Central>> lm(nd);
  lm.parameters.maxfev = opt.max_evaluations;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-12;
  const auto status = lm.minimize(x);

  Eigen::VectorXd fvec(f.values());
  f(x, fvec);
  LifetimeFit out;
  out.chi2 = fvec.squaredNorm();
  out.ndf = f.values() - np;
  const double red = out.ndf > 0 ? out.chi2 / out.ndf : out.chi2;
  using namespace Eigen::LevenbergMarquardtSpace;
  if (status == ImproperInputParameters || status == TooManyFunctionEvaluation || !x.allFinite())
    throw FitError("fit_lifetime: no convergence", red);
  const double range = h.edges.back() - h.edges.front();
  out.t1 = std::abs(x(1)) + 1e-3;
  if (out.t1 > range) throw FitError("fit_lifetime: lifetime runs away beyond the histogram range (flat data?)", red);
  out.amplitude = x(0);
  out.center = x(2);
  out.separation = np > 3 ? x(3) : 0.0;

  Eigen::MatrixXd jac(f.values(), np);
  nd.df(x, jac);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  out.covariance = jtj.completeOrthogonalDecomposition().pseudoInverse();
  out.sigma_amplitude = std::sqrt(std::max(0.0, out.covariance(0, 0)));
  out.sigma_t1 = std::sqrt(std::max(0.0, out.covariance(1, 1)));
  out.model = lifetime_model(h, jitter_fwhm, bin, opt, out.amplitude, out.t1, out.center, out.separation);
  return out;
}

HomFitContext HomFitContext::from_config(const ExperimentConfig& cfg) {
  const auto grid = simulation_grid(cfg);
  return {spdc_wavepacket(cfg, grid), cfg.spdc_delay, cfg.reflectivity, cfg.t2, BinKernel::kTriangle};
}

TauDensity HomFitContext::spdc_intensity() const {
  const auto& g = spdc.grid();
  TauDensity d;
  d.tau0 = g.t0;
  d.dtau = g.dt;
  d.values = spdc.samples().cwiseAbs2();
  d.values /= d.values.sum() * g.dt;
  return d;
}

std::vector<double> hom_peak_model(const CoincidenceHistogram& h, double t1, double t2, double jitter_fwhm,
                                   const HomFitContext& ctx, Polarization pol) {
  const auto d = hom_peak_density(t1, t2, ctx.spdc, ctx.delay, pol, ctx.reflectivity);
  return smear_with_detector(d, jitter_fwhm, h.width(0), h.centers(), ctx.kernel).values;
}

namespace {

double chi2(const CoincidenceHistogram& h, const std::vector<double>& w, const std::vector<double>& m, double a) {
  double c = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double r = static_cast<double>(h.counts[i]) - a * m[i];
    c += r * r * w[i];
  }
  return c;
}

HomModelCurve reference_curve(double t1, double t2, const HomFitContext& ctx, Polarization pol, double amp,
                              const CoincidenceHistogram& h) {
  const auto d = hom_peak_density(t1, t2, ctx.spdc, ctx.delay, pol, ctx.reflectivity);
  HomModelCurve c;
  c.t1 = t1;
  c.t2 = t2;
  c.amplitude = amp;
  const double bw = h.width(0);
  for (Eigen::Index k = 0; k < d.values.size(); ++k) {
    const double x = d.at(k);
    if (x < h.edges.front() || x > h.edges.back()) continue;
    c.delays.push_back(x);
    c.values.push_back(amp * d.values(k) * bw);
  }
  return c;
}

}  // namespace

HomPeakFit fit_hom_peak(const CoincidenceHistogram& perp, const CoincidenceHistogram& par, double t1,
                        double jitter_fwhm, const HomFitContext& ctx) {
  require(perp.edges == par.edges, "fit_hom_peak: histograms must share binning");
  require(perp.total() > 0 && par.total() > 0, "fit_hom_peak: empty histogram");
  HomPeakFit out;
  const auto wp = neyman_weights(perp);
  const auto wq = neyman_weights(par);
  const auto mp = hom_peak_model(perp, t1, ctx.t2_reference, jitter_fwhm, ctx, Polarization::kOrthogonal);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < perp.size(); ++i) {
    num += wp[i] * static_cast<double>(perp.counts[i]) * mp[i];
    den += wp[i] * mp[i] * mp[i];
  }
  require(den > 0.0, "fit_hom_peak: orthogonal model vanishes on the histogram");
  const double a = num / den;
  out.amplitude = a;
  out.chi2_perp = chi2(perp, wp, mp, a);
  out.ndf_perp = static_cast<int>(perp.size()) - 1;

  // interference amplitude c at the reference T2: par = a [mp - c (mp - mq)]
  const auto mq_ref = hom_peak_model(par, t1, ctx.t2_reference, jitter_fwhm, ctx, Polarization::kParallel);
  double cn = 0, cd = 0;
  for (std::size_t i = 0; i < par.size(); ++i) {
    const double r = static_cast<double>(par.counts[i]) - a * mp[i];
    const double b = -a * (mp[i] - mq_ref[i]);
    cn += wq[i] * r * b;
    cd += wq[i] * b * b;
  }
  out.interference = cd > 0 ? cn / cd : 0.0;
  out.sigma_interference = cd > 0 ? 1.0 / std::sqrt(cd) : INFINITY;
  out.interference_detected = out.interference > 3.0 * out.sigma_interference;

  out.perp_model.delays = perp.centers();
  out.perp_model.values = mp;
  for (auto& v : out.perp_model.values) v *= a;
  out.perp_model.jitter_fwhm = jitter_fwhm;
  out.perp_model.t1 = t1;
  out.perp_model.amplitude = a;
  out.perp_reference = reference_curve(t1, ctx.t2_reference, ctx, Polarization::kOrthogonal, a, perp);

  if (!out.interference_detected) {
    out.par_model = out.perp_model;
    out.chi2_par = chi2(par, wq, mp, a);
    out.ndf_par = static_cast<int>(par.size());
    return out;
  }

  auto chi2_par = [&](double t2) {
    return chi2(par, wq, hom_peak_model(par, t1, t2, jitter_fwhm, ctx, Polarization::kParallel), a);
  };
  const double lo = 0.05 * t1, hi = 2.0 * t1;
  std::uintmax_t iters = 80;
  const auto r = boost::math::tools::brent_find_minima(chi2_par, lo, hi, 30, iters);
  const double t2 = r.first;
  out.chi2_par = r.second;
  out.ndf_par = static_cast<int>(par.size()) - 1;
  if (iters >= 80 || t2 < lo * 1.01 || t2 > hi * 0.995 || !std::isfinite(t2))
    throw FitError("fit_hom_peak: coherence time not bracketed", out.chi2_par / std::max(1, out.ndf_par));
  const double step = std::max(1.0, 0.03 * t2);
  const double up = chi2_par(std::min(t2 + step, hi));
  const double dn = chi2_par(t2 - step);
  const double curv = (up - 2.0 * r.second + dn) / (step * step);
  out.t2 = t2;
  out.sigma_t2 = curv > 0 ? std::sqrt(2.0 / curv) : INFINITY;
  out.par_model.delays = par.centers();
  out.par_model.values = hom_peak_model(par, t1, t2, jitter_fwhm, ctx, Polarization::kParallel);
  for (auto& v : out.par_model.values) v *= a;
  out.par_model.jitter_fwhm = jitter_fwhm;
  out.par_model.t1 = t1;
  out.par_model.t2 = t2;
  out.par_model.amplitude = a;
  out.par_reference = reference_curve(t1, t2, ctx, Polarization::kParallel, a, par);
  out.perp_reference.t2 = t2;
  return out;
}

}  // namespace qdspdc
