#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qdspdc/config.hpp"
#include "qdspdc/hom.hpp"
#include "qdspdc/tagfile.hpp"

namespace qdspdc {

// Inverse-CDF sampler over a non-negative density on a uniform grid.
class GridSampler1D {
 public:
  GridSampler1D(const TimeGrid& grid, const Eigen::VectorXd& density);
  double total() const { return total_; }
  template <class Rng>
  double sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t k = locate(u(rng) * cdf_.back());
    return grid_.at(k) + (u(rng) - 0.5) * grid_.dt;
  }

 private:
  std::size_t locate(double x) const;
  TimeGrid grid_;
  std::vector<double> cdf_;
  double total_ = 0.0;
};

struct PairSample {
  double t1 = 0.0;   // D1 click (or the single click when same_port)
  double t2 = 0.0;   // D2 click; unused when same_port
  bool same_port = false;
  int port = 0;      // 1 or 2 when same_port
};

// Samples detection times of two photons meeting at the beamsplitter.
// Split events come from the coincidence density; bunched pairs leave one port
// and produce a single click at the earlier arrival.
class PairSampler {
 public:
  PairSampler(const CoincidenceDensity& split, const Eigen::MatrixXd& same_port);
  double split_probability() const { return p_split_; }
  template <class Rng>
  PairSample sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PairSample s;
    const double x = u(rng);
    const auto& cdf = x < p_split_ ? split_cdf_ : same_cdf_;
    const std::size_t k = locate(cdf, u(rng) * cdf.back());
    const std::size_t n = grid_.n;
    double a = grid_.at(k % n) + (u(rng) - 0.5) * grid_.dt;
    double b = grid_.at(k / n) + (u(rng) - 0.5) * grid_.dt;
    if (x < p_split_) {
      s.t1 = a;
      s.t2 = b;
    } else {
      s.same_port = true;
      s.port = u(rng) < 0.5 ? 1 : 2;
      s.t1 = std::min(a, b);
    }
    return s;
  }

 private:
  static std::size_t locate(const std::vector<double>& cdf, double x);
  TimeGrid grid_;
  std::vector<double> split_cdf_, same_cdf_;
  double p_split_ = 0.0;
};

// Photon-level model of one laser period, precomputed from the physics modules.
struct SimulationModel {
  explicit SimulationModel(const ExperimentConfig& cfg);

  ExperimentConfig cfg;
  TimeGrid grid;  // relative to the QD onset
  TemporalAmplitude spdc_pulse;
  GridSampler1D qd_only, spdc_only;
  PairSampler pair;
};

// The filtered SPDC wavepacket used by the simulation, centred at zero on `grid`.
TemporalAmplitude spdc_wavepacket(const ExperimentConfig& cfg, const TimeGrid& grid);
TimeGrid simulation_grid(const ExperimentConfig& cfg);

struct SimulationOptions {
  int threads = 0;               // 0: OpenMP default, 1: serial reference path
  std::uint64_t blocks_per_round = 64;  // blocks generated concurrently before merging
};

// Periods per RNG substream; fixed so results do not depend on the work split.
constexpr std::uint64_t kPeriodsPerBlock = 1 << 16;

void simulate_run(const ExperimentConfig& cfg, TagSink& sink, const SimulationOptions& opt = {});
void simulate_run(const SimulationModel& model, TagSink& sink, const SimulationOptions& opt = {});
std::vector<TagRecord> simulate_to_vector(const ExperimentConfig& cfg, const SimulationOptions& opt = {});

}  // namespace qdspdc
