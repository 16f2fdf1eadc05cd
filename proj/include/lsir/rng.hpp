#pragma once

#include <cstdint>
#include <random>

namespace lsir {

/// Mixes (master seed, stream index) into an independent stream seed, so
/// replications and bootstrap draws are reproducible regardless of the
/// parallelism degree.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

/// Seeded random stream with explicit, portable transforms for every
/// distribution used by the simulation bench (std distributions are
/// implementation-defined, which would break bitwise reproducibility).
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on (0,1), never exactly 0.
    double uniform();

    /// Standard normal via Box-Muller (pairs cached).
    double normal();

    /// Chi-square with 2 degrees of freedom: -2 log U.
    double chi2_2();

    /// Student t with 4 degrees of freedom.
    double t4();

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace lsir
