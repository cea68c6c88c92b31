#include <catch_amalgamated.hpp>

#include "fraclap/fraclap.hpp"

using namespace fraclap;
using Catch::Approx;

TEST_CASE("field selectors", "[selectors]") {
    using selectors::parse_field;
    CHECK(parse_field<1>("const:2.5")(Vec<1>{7.0}) == 2.5);
    CHECK(parse_field<1>("zero")(Vec<1>{0.1}) == 0.0);
    CHECK(parse_field<1>("chi:2,3")(Vec<1>{2.5}) == 1.0);
    CHECK(parse_field<1>("chi:2,3,4")(Vec<1>{2.5}) == 4.0);
    CHECK(parse_field<1>("chi:2,3")(Vec<1>{3.5}) == 0.0);
    CHECK(parse_field<1>("poly:0.5,0,-0.5")(Vec<1>{0.2}) == Approx(0.48));
    CHECK(parse_field<1>("poly:1")(Vec<1>{1.2}) == 0.0);
    CHECK(parse_field<1>("quartic:3,0.5,1.875")(Vec<1>{3.0}) == 1.875);
    CHECK(parse_field<1>("bump:0,1")(Vec<1>{0.0}) == Approx(1.0));
    CHECK(parse_field<1>("gauss:0,1")(Vec<1>{0.0}) == 1.0);
    CHECK(parse_field<1>("dpow:0.5")(Vec<1>{0.6}) == Approx(0.8));
    CHECK(parse_field<1>("affine:1,2")(Vec<1>{3.0}) == 7.0);
    CHECK(parse_field<1>("pbump:0,0.5,3")(Vec<1>{0.25}) == Approx(0.421875));
    CHECK(parse_field<2>("bump:0.2,0.3")(Vec<2>{0.2, 0.0}) == Approx(1.0));
    CHECK(parse_field<1>("chi:2,3").name == "chi:2,3");
}

TEST_CASE("malformed selectors are usage errors", "[selectors]") {
    using selectors::parse_field;
    CHECK_THROWS_AS(parse_field<1>("const"), DomainError);
    CHECK_THROWS_AS(parse_field<1>("const:x"), DomainError);
    CHECK_THROWS_AS(parse_field<1>("const:1,2"), DomainError);
    CHECK_THROWS_AS(parse_field<1>("chi:3,2"), DomainError);
    CHECK_THROWS_AS(parse_field<1>("wave:1"), DomainError);
    CHECK_THROWS_AS(parse_field<1>("const:1e"), DomainError);
}

TEST_CASE("boundary selectors", "[selectors]") {
    const auto g = selectors::parse_boundary<1>("pm:2,5");
    CHECK(g(Vec<1>{-1.0}) == 2.0);
    CHECK(g(Vec<1>{1.0}) == 5.0);
    CHECK(selectors::parse_boundary<1>("const:3")(Vec<1>{1.0}) == 3.0);
    CHECK(selectors::parse_boundary<1>("poly:1,1")(Vec<1>{1.0}) == Approx(2.0));
    CHECK_THROWS_AS(selectors::parse_boundary<2>("pm:1,2"), DomainError);
}
