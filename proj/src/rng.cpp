#include "lsir/rng.hpp"

#include <cmath>

namespace lsir {

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over the combined words
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double RngStream::uniform() {
    // 53-bit mantissa in (0,1]; flip to [epsilon,1) form avoiding exact 0
    double u = (eng_() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

double RngStream::chi2_2() { return -2.0 * std::log(uniform()); }

double RngStream::t4() {
    double z = normal();
    double c = chi2_2() + chi2_2(); // chi2 with 4 df
    return z / std::sqrt(c / 4.0);
}

} // namespace lsir
