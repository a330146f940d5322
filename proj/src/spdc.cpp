#include "qdspdc/spdc.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qdspdc/errors.hpp"

namespace qdspdc {

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// x per GHz of xi, so that |sinc|^2 has FWHM pm_bandwidth along xi.
double xi_scale(const PhasematchParams& pm) { return 2.0 * sinc_half_power_root() / pm.pm_bandwidth; }

double xi_extent(const PhasematchParams& pm) { return (pm.side_lobes + 1) * kPi / xi_scale(pm); }

double jacobian(const PhasematchParams& pm) {
  const double ws = pm.signal_weight(), wi = pm.idler_weight();
  return pm.orientation == PhasematchOrientation::kSum ? std::abs(ws - wi) : ws + wi;
}

}  // namespace

void PhasematchParams::validate() const {
  require(pm_bandwidth > 0.0 && std::isfinite(pm_bandwidth), "phasematch: pm_bandwidth must be positive");
  require(asymmetry > 0.0 && std::isfinite(asymmetry), "phasematch: asymmetry must be positive");
  require(side_lobes >= 0, "phasematch: side_lobes must be >= 0");
  require(signal_center > 0.0 && idler_center > 0.0, "phasematch: centre wavelengths must be positive");
  require(jacobian(*this) > 1e-6,
          "phasematch: sum orientation with asymmetry 1 does not confine the spectrum; use the difference orientation");
}

double PhasematchParams::xi(double nu_s, double nu_i) const {
  const double ws = signal_weight(), wi = idler_weight();
  return orientation == PhasematchOrientation::kSum ? ws * nu_s + wi * nu_i : ws * nu_s - wi * nu_i;
}

cplx PhasematchParams::phasematch(double nu_s, double nu_i) const {
  const double x = xi_scale(*this) * xi(nu_s, nu_i);
  if (std::abs(x) > (side_lobes + 1) * kPi) return 0.0;
  return sinc(x);
}

JointSpectralAmplitude::JointSpectralAmplitude(FrequencyGrid signal_grid, FrequencyGrid idler_grid, MatrixXc values,
                                               double pump_fwhm_time, PhasematchParams pm)
    : signal_grid_(signal_grid), idler_grid_(idler_grid), values_(std::move(values)), pump_fwhm_time_(pump_fwhm_time),
      pm_(pm) {
  require(static_cast<std::size_t>(values_.rows()) == signal_grid_.n &&
              static_cast<std::size_t>(values_.cols()) == idler_grid_.n,
          "jsa: matrix does not match grids");
  const double nrm = values_.squaredNorm() * signal_grid_.dnu * idler_grid_.dnu;
  require(nrm > 0.0 && std::isfinite(nrm), "jsa: zero amplitude");
  values_ /= std::sqrt(nrm);
}

double JointSpectralAmplitude::norm() const { return values_.squaredNorm() * signal_grid_.dnu * idler_grid_.dnu; }

double pump_bandwidth(double pump_fwhm_time) {
  return 2.0 * std::log(2.0) / kPi / (pump_fwhm_time * kGhzPs);
}

FrequencyGrid auto_jsa_grid(double pump_fwhm_time, const PhasematchParams& pm, double dnu) {
  pm.validate();
  require(pump_fwhm_time > 0.0, "jsa: pump duration must be positive");
  const double u = std::isinf(pump_fwhm_time) ? 0.0 : 2.5 * pump_bandwidth(pump_fwhm_time);
  const double xi = xi_extent(pm);
  const double ws = pm.signal_weight(), wi = pm.idler_weight();
  const double d = jacobian(pm);
  const double half = std::max((xi + wi * u) / d, (xi + ws * u) / d);
  return FrequencyGrid::symmetric(1.02 * half + 2.0 * dnu, dnu);
}

JointSpectralAmplitude build_jsa(double pump_fwhm_time, const PhasematchParams& pm, const FrequencyGrid& sg,
                                 const FrequencyGrid& ig) {
  pm.validate();
  require(pump_fwhm_time > 0.0, "jsa: pump duration must be positive");
  const bool cw = std::isinf(pump_fwhm_time);
  const double dp = cw ? 0.0 : pump_bandwidth(pump_fwhm_time);
  const auto ns = static_cast<Eigen::Index>(sg.n), ni = static_cast<Eigen::Index>(ig.n);
  MatrixXc f(ns, ni);
  for (Eigen::Index c = 0; c < ni; ++c) {
    const double nui = ig.at(static_cast<std::size_t>(c));
    for (Eigen::Index r = 0; r < ns; ++r) {
      const double nus = sg.at(static_cast<std::size_t>(r));
      const double u = nus + nui;
      double alpha;
      if (cw)
        alpha = std::abs(u) < 1e-6 * std::min(sg.dnu, ig.dnu) ? 1.0 : 0.0;
      else
        alpha = std::exp(-2.0 * std::log(2.0) * u * u / (dp * dp));
      f(r, c) = alpha == 0.0 ? cplx(0.0) : alpha * pm.phasematch(nus, nui);
    }
  }
  const double grid_norm = f.squaredNorm() * sg.dnu * ig.dnu;
  require(grid_norm > 0.0, "jsa: grid misses the spectral support");
  if (!cw) {
    const double pump_int = dp * std::sqrt(kPi / (4.0 * std::log(2.0)));
    const double xmax = (pm.side_lobes + 1) * kPi;
    const double sinc_int = 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                      [](double x) { const double s = sinc(x); return s * s; }, 0.0, xmax, 12, 1e-12);
    const double analytic = pump_int * sinc_int / xi_scale(pm) / jacobian(pm);
    const double clipped = 1.0 - grid_norm / analytic;
    if (clipped > 1e-4)
      throw ValidationError("jsa: grid clips " + std::to_string(clipped) + " of the norm (limit 1e-4)");
  } else {
    const double need = xi_extent(pm) / jacobian(pm);
    require(-sg.nu0 >= need && -ig.nu0 >= need && sg.at(sg.n - 1) >= need && ig.at(ig.n - 1) >= need,
            "jsa: grid clips the CW phase-matching line");
  }
  JointSpectralAmplitude jsa(sg, ig, std::move(f), pump_fwhm_time, pm);
  for (Arm arm : {Arm::kSignal, Arm::kIdler}) {
    const auto m = marginal_spectrum(jsa, arm);
    require(m.grid.span() >= 6.0 * m.fwhm, "jsa: grid span below 6x the marginal FWHM");
  }
  return jsa;
}

JointSpectralAmplitude build_jsa(double pump_fwhm_time, const PhasematchParams& pm, double dnu) {
  const auto g = auto_jsa_grid(pump_fwhm_time, pm, dnu);
  return build_jsa(pump_fwhm_time, pm, g, g);
}

MarginalSpectrum marginal_spectrum(const JointSpectralAmplitude& jsa, Arm arm, const SpectralFilter& filter) {
  const bool sig = arm == Arm::kSignal;
  const FrequencyGrid& g = sig ? jsa.signal_grid() : jsa.idler_grid();
  const double partner_dnu = sig ? jsa.idler_grid().dnu : jsa.signal_grid().dnu;
  Eigen::VectorXd m = sig ? Eigen::VectorXd(jsa.values().cwiseAbs2().rowwise().sum())
                          : Eigen::VectorXd(jsa.values().cwiseAbs2().colwise().sum().transpose());
  m *= partner_dnu;
  for (std::size_t k = 0; k < g.n; ++k) m(static_cast<Eigen::Index>(k)) *= filter.cell_transmission(g.at(k), g.dnu);
  const double area = m.sum() * g.dnu;
  require(area > 0.0, "marginal: filter rejects the whole spectrum");
  m /= area;
  std::vector<double> x(g.n), y(g.n);
  for (std::size_t k = 0; k < g.n; ++k) {
    x[k] = g.at(k);
    y[k] = m(static_cast<Eigen::Index>(k));
  }
  return {g, m, sampled_fwhm(x, y)};
}

double spectral_correlation(const JointSpectralAmplitude& jsa) {
  const auto& sg = jsa.signal_grid();
  const auto& ig = jsa.idler_grid();
  const Eigen::MatrixXd w = jsa.values().cwiseAbs2();
  const double tot = w.sum();
  double ms = 0, mi = 0;
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      ms += w(r, c) * sg.at(static_cast<std::size_t>(r));
      mi += w(r, c) * ig.at(static_cast<std::size_t>(c));
    }
  ms /= tot;
  mi /= tot;
  double vs = 0, vi = 0, cov = 0;
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      const double a = sg.at(static_cast<std::size_t>(r)) - ms, b = ig.at(static_cast<std::size_t>(c)) - mi;
      vs += w(r, c) * a * a;
      vi += w(r, c) * b * b;
      cov += w(r, c) * a * b;
    }
  return cov / std::sqrt(vs * vi);
}

namespace {

// Amplitude matrix after both filters, restricted to signal rows that pass.
struct FilteredAmplitude {
  MatrixXc a;                       // rows: active signal cells
  std::vector<Eigen::Index> rows;   // indices into the signal grid
  double herald_norm = 0.0;         // sum |f h_i|^2 dnu dnu (before the signal filter)
};

FilteredAmplitude filtered_amplitude(const JointSpectralAmplitude& jsa, const SpectralFilter& sf,
                                     const SpectralFilter& idf) {
  const auto& sg = jsa.signal_grid();
  const auto& ig = jsa.idler_grid();
  VectorXc hi(static_cast<Eigen::Index>(ig.n));
  for (std::size_t k = 0; k < ig.n; ++k) hi(static_cast<Eigen::Index>(k)) = idf.cell_amplitude(ig.at(k), ig.dnu);
  FilteredAmplitude out;
  std::vector<cplx> hs;
  for (std::size_t k = 0; k < sg.n; ++k) {
    const cplx h = sf.cell_amplitude(sg.at(k), sg.dnu);
    if (std::norm(h) > 0.0) {
      out.rows.push_back(static_cast<Eigen::Index>(k));
      hs.push_back(h);
    }
  }
  const MatrixXc fh = jsa.values() * hi.asDiagonal();
  out.herald_norm = fh.squaredNorm() * sg.dnu * ig.dnu;
  out.a.resize(static_cast<Eigen::Index>(out.rows.size()), fh.cols());
  for (std::size_t r = 0; r < out.rows.size(); ++r)
    out.a.row(static_cast<Eigen::Index>(r)) = hs[r] * fh.row(out.rows[r]);
  return out;
}

}  // namespace

double signal_transmission(const JointSpectralAmplitude& jsa, const SpectralFilter& sf, const SpectralFilter& idf) {
  const auto fa = filtered_amplitude(jsa, sf, idf);
  require(fa.herald_norm > 0.0, "idler filter rejects every herald");
  return fa.a.squaredNorm() * jsa.signal_grid().dnu * jsa.idler_grid().dnu / fa.herald_norm;
}

double calibrate_insertion(const JointSpectralAmplitude& jsa, const SpectralFilter& sf, double target,
                           double baseline) {
  require(target > 0.0 && baseline > 0.0, "heralding calibration: efficiencies must be positive");
  const double tr = signal_transmission(jsa, sf);
  if (tr < 1e-9) throw PhotonRejected("heralding calibration: filter rejects the signal");
  return target / (baseline * tr);
}

HeraldedState heralded_signal_state(const JointSpectralAmplitude& jsa, const SpectralFilter& sf,
                                    const SpectralFilter& idf, const HeraldingModel& model, const TimeGrid& grid) {
  const auto fa = filtered_amplitude(jsa, sf, idf);
  require(fa.herald_norm > 0.0, "idler filter rejects every herald");
  const double dns = jsa.signal_grid().dnu, dni = jsa.idler_grid().dnu;
  const double tr = fa.a.squaredNorm() * dns * dni / fa.herald_norm;
  const double eff = model.baseline * model.insertion * tr;
  if (!(tr >= 1e-9) || !(eff >= 1e-9)) throw PhotonRejected("heralded state: efficiency underflow, photon rejected");
  const auto nt = static_cast<Eigen::Index>(grid.n);
  const auto nr = static_cast<Eigen::Index>(fa.rows.size());
  MatrixXc e(nt, nr);
  for (Eigen::Index r = 0; r < nr; ++r) {
    const double nu = jsa.signal_grid().at(static_cast<std::size_t>(fa.rows[static_cast<std::size_t>(r)]));
    for (Eigen::Index j = 0; j < nt; ++j)
      e(j, r) = std::polar(1.0, -2.0 * kPi * nu * grid.at(static_cast<std::size_t>(j)) * kGhzPs);
  }
  const MatrixXc b = e * fa.a;
  return {TwoTimeCoherence(grid, b * b.adjoint()), std::min(eff, 1.0), tr};
}

HeraldedState heralded_signal_state(const JointSpectralAmplitude& jsa, const SpectralFilter& sf,
                                    const SpectralFilter& idf, const HeraldingModel& model) {
  const auto& sg = jsa.signal_grid();
  const double period = 1.0 / (sg.dnu * kGhzPs);
  const double dt = period / static_cast<double>(sg.n);
  return heralded_signal_state(jsa, sf, idf, model, TimeGrid{-0.5 * period + 0.5 * dt, dt, sg.n});
}

double schmidt_purity(const JointSpectralAmplitude& jsa, const SpectralFilter& sf, const SpectralFilter& idf) {
  const auto fa = filtered_amplitude(jsa, sf, idf);
  if (fa.a.rows() == 0) throw PhotonRejected("schmidt_purity: filter rejects the signal");
  Eigen::BDCSVD<MatrixXc> svd(fa.a);
  const Eigen::VectorXd s2 = svd.singularValues().cwiseAbs2();
  const double tot = s2.sum();
  return s2.squaredNorm() / (tot * tot);
}

void write_jsa_csv(const JointSpectralAmplitude& jsa, std::ostream& os) {
  os << "nu_s_GHz,nu_i_GHz,abs_f2\n";
  const auto& sg = jsa.signal_grid();
  const auto& ig = jsa.idler_grid();
  for (std::size_t r = 0; r < sg.n; ++r)
    for (std::size_t c = 0; c < ig.n; ++c)
      os << sg.at(r) << ',' << ig.at(c) << ','
         << std::norm(jsa.values()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) << '\n';
}

void write_marginal_csv(const MarginalSpectrum& m, std::ostream& os) {
  os << "nu_GHz,intensity\n";
  for (std::size_t k = 0; k < m.grid.n; ++k) os << m.grid.at(k) << ',' << m.intensity(static_cast<Eigen::Index>(k)) << '\n';
}

}  // namespace qdspdc
