#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qdspdc {

// Counts on contiguous bins; errors are Poisson sqrt(counts).
struct CoincidenceHistogram {
  std::vector<double> edges;  // ps, size = counts.size() + 1
  std::vector<std::uint64_t> counts;

  CoincidenceHistogram() = default;
  CoincidenceHistogram(double lo, double width, std::size_t nbins);

  std::size_t size() const { return counts.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  std::vector<double> centers() const;
  std::vector<double> errors() const;
  std::uint64_t total() const;
  // Adds x if inside the range; returns false otherwise.
  bool fill(double x, std::uint64_t w = 1);
  void add(const CoincidenceHistogram& o);
  // Bins whose centres lie in [lo, hi).
  CoincidenceHistogram slice(double lo, double hi) const;
  void write_csv(std::ostream& os, const std::string& xname = "tau_ps") const;
};

}  // namespace qdspdc
