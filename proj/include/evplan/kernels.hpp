#pragma once

// Data-parallel hot loops. Each kernel has a plain serial reference path and
// an OpenMP path; both produce bit-identical results (no floating-point
// reductions across threads), which the tests and the benchmark rely on.

#include <span>
#include <vector>

#include "evplan/geo.hpp"

namespace evplan {

class ZoneGrid;

enum class Execution { serial, parallel };

/// Caps OpenMP threads for the whole process; 0 leaves the runtime default.
void set_thread_limit(int threads);
int thread_count();

namespace kernels {

/// Zone index per point, -1 when outside every zone.
std::vector<int> locate_points(const ZoneGrid& grid, std::span<const LonLat> points, Execution exec);

/// Production-constrained gravity rows:
/// out[i*n + j] = A_j exp(-beta d_ij) / sum_k A_k exp(-beta d_ik).
/// Rows whose weights are all zero are left zero.
void gravity_rows(std::span<const double> attractiveness, std::span<const double> distances, double beta,
                  std::span<double> out, Execution exec);

/// Constant-power charging pulse on a 24 h circular day.
struct Pulse {
    int zone = 0;
    double power_kw = 0.0;
    double start_h = 0.0;     ///< in [0, 24)
    double duration_h = 0.0;  ///< may exceed 24; wraps around
};

/// Accumulates pulses into bin-average power. `pulses` must be grouped so
/// that zone z's pulses appear in their original relative order; the result
/// is per_zone[z * nbins + b] in kW. Parallel over zones.
void bin_pulses(std::span<const Pulse> pulses, int n_zones, double step_h, std::span<double> per_zone,
                Execution exec);

/// Sum of per-zone series in zone order, so serial and parallel agree bit for bit.
std::vector<double> sum_zone_series(std::span<const double> per_zone, int n_zones, std::size_t nbins);

}  // namespace kernels
}  // namespace evplan
