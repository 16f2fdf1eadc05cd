#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "lsir/special.hpp"

using namespace lsir;

TEST_CASE("normal cdf and pdf reference values") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(norm_cdf(-8.0) == doctest::Approx(6.22096e-16).epsilon(1e-3));
}

TEST_CASE("normal quantile inverts the cdf") {
    for (double p : {1e-6, 0.01, 0.025, 0.3, 0.5, 0.77, 0.975, 0.999999}) {
        CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK_THROWS(norm_quantile(0.0));
    CHECK_THROWS(norm_quantile(1.0));
}

TEST_CASE("chi-square survival function") {
    // chi2(1) tail at 4 equals erfc(sqrt(2)) -- independent identity
    CHECK(chi2_sf(4.0, 1) == doctest::Approx(std::erfc(std::sqrt(2.0))).epsilon(1e-12));
    // chi2(2) is exponential(1/2)
    CHECK(chi2_sf(3.0, 2) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
    CHECK(chi2_sf(0.0, 3) == 1.0);
    CHECK(chi2_sf(1e3, 4) < 1e-200);
    CHECK_THROWS(chi2_sf(1.0, 0));
}
