#include "qdspdc/histogram.hpp"

#include <numeric>
#include <ostream>

#include "qdspdc/errors.hpp"

namespace qdspdc {

CoincidenceHistogram::CoincidenceHistogram(double lo, double width, std::size_t nbins) : counts(nbins, 0) {
  require(width > 0.0, "histogram: bin width must be positive");
  edges.resize(nbins + 1);
  for (std::size_t i = 0; i <= nbins; ++i) edges[i] = lo + static_cast<double>(i) * width;
}

std::vector<double> CoincidenceHistogram::centers() const {
  std::vector<double> c(size());
  for (std::size_t i = 0; i < size(); ++i) c[i] = center(i);
  return c;
}

std::vector<double> CoincidenceHistogram::errors() const {
  std::vector<double> e(size());
  for (std::size_t i = 0; i < size(); ++i) e[i] = std::sqrt(static_cast<double>(counts[i]));
  return e;
}

std::uint64_t CoincidenceHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

bool CoincidenceHistogram::fill(double x, std::uint64_t w) {
  if (counts.empty() || x < edges.front() || x >= edges.back()) return false;
  const double w0 = edges[1] - edges[0];
  auto i = static_cast<std::size_t>((x - edges.front()) / w0);
  if (i >= counts.size()) i = counts.size() - 1;
  counts[i] += w;
  return true;
}

void CoincidenceHistogram::add(const CoincidenceHistogram& o) {
  require(o.edges == edges, "histogram: cannot add histograms with different binning");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
}

CoincidenceHistogram CoincidenceHistogram::slice(double lo, double hi) const {
  CoincidenceHistogram out;
  for (std::size_t i = 0; i < size(); ++i) {
    const double c = center(i);
    if (c < lo || c >= hi) continue;
    if (out.edges.empty()) out.edges.push_back(edges[i]);
    out.edges.push_back(edges[i + 1]);
    out.counts.push_back(counts[i]);
  }
  return out;
}

void CoincidenceHistogram::write_csv(std::ostream& os, const std::string& xname) const {
  os << xname << ",counts,error\n";
  for (std::size_t i = 0; i < size(); ++i)
    os << center(i) << ',' << counts[i] << ',' << std::sqrt(static_cast<double>(counts[i])) << '\n';
}

}  // namespace qdspdc
