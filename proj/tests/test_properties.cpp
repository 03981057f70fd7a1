#include "properties.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace dchaos;

TEST_CASE("phi_n ordering over 1000 random pairs", "[properties]") {
    auto r = testing::phi_order_properties(1000, 1);
    INFO(r.first_failure);
    CHECK(r.cases == 1000);
    CHECK(r.failures == 0);
}

TEST_CASE("upper density coupling over 1000 random subsets", "[properties]") {
    auto r = testing::density_coupling_properties(1000, 5000);
    INFO(r.first_failure);
    CHECK(r.failures == 0);
}

TEST_CASE("verdict implications and path agreement over 1000 random pairs", "[properties]") {
    auto r = testing::verdict_properties(1000, 90000);
    INFO(r.first_failure);
    CHECK(r.cases == 1000);
    CHECK(r.failures == 0);
}
