#include <boost/multiprecision/cpp_bin_float.hpp>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "susycrystal/params.hpp"

using susycrystal::CrystalParams;
using susycrystal::derive_params;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

// Independent high-precision route for rho and mu.
struct BigParams {
    big rho;
    big mu;
    big k1;
};

BigParams oracle(double epsilon, double k0) {
    const big e = epsilon, k = k0;
    const big y = sqrt(1 - e / (k * k));
    return {atanh(y), sqrt(e) / k, sqrt(k * k - e)};
}

double rel(double got, const big& want) {
    return static_cast<double>(abs(big(got) - want) / abs(want));
}

}  // namespace

TEST_CASE("derived parameters match the high-precision oracle") {
    for (const double eps : {0.01, 0.1, 0.5, 0.9}) {
        const CrystalParams cp = derive_params(eps, 1.0, 100);
        const BigParams want = oracle(eps, 1.0);
        INFO("epsilon = " << eps);
        CHECK(rel(cp.rho, want.rho) < 1e-14);
        CHECK(rel(cp.mu, want.mu) < 1e-14);
        CHECK(rel(cp.k1, want.k1) < 1e-14);
    }
    // non-unit Bragg wavenumber
    const CrystalParams cp = derive_params(0.02, 2.0, 7);
    const BigParams want = oracle(0.02, 2.0);
    CHECK(rel(cp.rho, want.rho) < 1e-14);
    CHECK(rel(cp.mu, want.mu) < 1e-14);
}

TEST_CASE("frozen reference values") {
    const CrystalParams shallow = derive_params(0.01, 1.0, 100);
    CHECK(shallow.rho == Catch::Approx(2.9932228461263809).epsilon(1e-14));
    CHECK(shallow.mu == Catch::Approx(0.1).epsilon(1e-14));
    CHECK(shallow.k1 == Catch::Approx(0.99498743710661995).epsilon(1e-14));
    CHECK(shallow.period == Catch::Approx(std::numbers::pi).epsilon(1e-15));
    CHECK(shallow.length == Catch::Approx(100.0 * std::numbers::pi).epsilon(1e-15));

    const CrystalParams deeper = derive_params(0.1, 1.0, 100);
    CHECK(deeper.rho == Catch::Approx(1.8184464592320668).epsilon(1e-14));
    CHECK(deeper.mu == Catch::Approx(0.31622776601683794).epsilon(1e-14));
}

TEST_CASE("structural identities") {
    for (const double eps : {1e-8, 1e-4, 0.01, 0.1, 0.5, 0.999}) {
        const CrystalParams cp = derive_params(eps, 1.0, 10);
        INFO("epsilon = " << eps);
        // continuity of the auxiliary solution at x = 0
        CHECK(std::abs(cp.mu * std::cosh(cp.rho) - 1.0) < 1e-12);
        // tanh(rho) = k1/k0
        CHECK(std::tanh(cp.rho) == Catch::Approx(cp.k1 / cp.k0).epsilon(1e-12));
        CHECK(cp.factorization_energy == Catch::Approx(cp.k0 * cp.k0 - eps).epsilon(1e-15));
    }
}

TEST_CASE("stable rho formula beats naive atanh for shallow wells") {
    // the naive route atanh(sqrt(1-eps)) loses digits through 1 - y;
    // the implementation must stay pinned to the oracle
    const double eps = 1e-12;
    const CrystalParams cp = derive_params(eps, 1.0, 1);
    CHECK(rel(cp.rho, oracle(eps, 1.0).rho) < 1e-13);
}

TEST_CASE("deep-well limit") {
    // epsilon -> k0^2 gives rho -> 0, mu -> 1
    const CrystalParams cp = derive_params(1.0 - 1e-12, 1.0, 1);
    CHECK(cp.rho == Catch::Approx(0.0).margin(2e-6));
    CHECK(cp.mu == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("free-space limit is representable") {
    const CrystalParams cp = derive_params(0.0, 1.0, 5);
    CHECK(std::isinf(cp.rho));
    CHECK(cp.mu == 0.0);
    CHECK(cp.k1 == 1.0);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(derive_params(-0.01, 1.0, 1), std::domain_error);
    CHECK_THROWS_AS(derive_params(1.0, 1.0, 1), std::domain_error);   // epsilon == k0^2
    CHECK_THROWS_AS(derive_params(1.5, 1.0, 1), std::domain_error);
    CHECK_THROWS_AS(derive_params(0.01, 1.0, 0), std::domain_error);  // N < 1
    CHECK_THROWS_AS(derive_params(0.01, -1.0, 1), std::domain_error);
    CHECK_THROWS_AS(derive_params(0.01, 0.0, 1), std::domain_error);
}
