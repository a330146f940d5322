#include "qdspdc/grid.hpp"

#include <algorithm>
#include <cmath>

#include "qdspdc/errors.hpp"

namespace qdspdc {

TimeGrid TimeGrid::covering(double start, double stop, double dt) {
  require(dt > 0.0, "time grid: dt must be positive");
  require(stop > start, "time grid: empty range");
  const auto n = static_cast<std::size_t>(std::ceil((stop - start) / dt));
  return TimeGrid{start + 0.5 * dt, dt, n};
}

bool TimeGrid::compatible(const TimeGrid& o) const {
  return n == o.n && std::abs(dt - o.dt) <= 1e-12 * dt && std::abs(t0 - o.t0) <= 1e-9 * dt;
}

double TimeGrid::dft_frequency(std::size_t k) const {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  const double signed_k = (2 * k < n) ? kk : kk - nn;
  return signed_k / (nn * dt) / kGhzPs;
}

FrequencyGrid FrequencyGrid::symmetric(double half_span, double dnu) {
  require(dnu > 0.0 && half_span > 0.0, "frequency grid: bad spacing");
  const auto half = static_cast<std::size_t>(std::ceil(half_span / dnu));
  return FrequencyGrid{-static_cast<double>(half) * dnu, dnu, 2 * half + 1};
}

bool FrequencyGrid::operator==(const FrequencyGrid& o) const {
  return n == o.n && std::abs(dnu - o.dnu) <= 1e-12 * dnu && std::abs(nu0 - o.nu0) <= 1e-9 * dnu;
}

double sampled_fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  if (y.size() < 3 || x.size() != y.size()) return 0.0;
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[peak];
  if (half <= 0.0) return 0.0;
  std::size_t lo = peak;
  while (lo > 0 && y[lo - 1] >= half) --lo;
  std::size_t hi = peak;
  while (hi + 1 < y.size() && y[hi + 1] >= half) ++hi;
  double left = x[lo];
  if (lo > 0) left = x[lo - 1] + (half - y[lo - 1]) / (y[lo] - y[lo - 1]) * (x[lo] - x[lo - 1]);
  double right = x[hi];
  if (hi + 1 < y.size()) right = x[hi] + (y[hi] - half) / (y[hi] - y[hi + 1]) * (x[hi + 1] - x[hi]);
  return right - left;
}

}  // namespace qdspdc
