#include "doctest.h"

#include <cmath>
#include <set>

#include "cos/partition.hpp"
#include "cos/rng.hpp"

using namespace cosim;

TEST_CASE("build_partition cell counts") {
    CHECK(build_partition(1, 1).cell_count == 1);
    CHECK(build_partition(2, 3).cell_count == 9);
    CHECK(build_partition(1, 12).cell_count == 12);
    CHECK(build_partition(3, 10).cell_count == 1000);
}

TEST_CASE("build_partition rejects overflow and bad arguments") {
    CHECK_THROWS_AS(build_partition(40, 10), ConfigError);
    CHECK_THROWS_AS(build_partition(0, 3), ConfigError);
    CHECK_THROWS_AS(build_partition(1, 0), ConfigError);
    try {
        build_partition(40, 10);
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("10") != std::string::npos);
        CHECK(msg.find("40") != std::string::npos);
    }
}

TEST_CASE("locate maps contexts to cells") {
    const Partition p1 = build_partition(1, 4);
    CHECK(locate(p1, std::vector<double>{0.3}).coords == std::vector<int>{1});
    CHECK(locate(p1, std::vector<double>{0.3}).linear == 1);
    // upper boundary clamps into the last slice
    CHECK(locate(p1, std::vector<double>{1.0}).coords == std::vector<int>{3});
    CHECK(locate(p1, std::vector<double>{1.0}).linear == 3);

    const Partition p2 = build_partition(2, 3);
    const auto idx = locate(p2, std::vector<double>{0.5, 0.99});
    CHECK(idx.coords == std::vector<int>{1, 2});
    CHECK(idx.linear == 7);
}

TEST_CASE("locate rejects out-of-range coordinates and names the dimension") {
    const Partition p = build_partition(2, 3);
    CHECK_THROWS_AS(locate(p, std::vector<double>{0.5, 1.3}), std::domain_error);
    try {
        locate(p, std::vector<double>{0.5, 1.3});
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("coordinate 1") != std::string::npos);
    }
    CHECK_THROWS_AS(locate(p, std::vector<double>{-0.01, 0.5}), std::domain_error);
}

TEST_CASE("slicing_parameter ceilings") {
    CHECK(slicing_parameter(20000, 1.0, 1) == 12);  // 20000^(1/4) = 11.89...
    CHECK(slicing_parameter(1, 0.5, 3) == 1);
    CHECK(slicing_parameter(100000000, 1.0, 1) == 100);  // exact fourth root
    // time as context bumps the exponent denominator by one
    CHECK(slicing_parameter(20000, 1.0, 1, true) == static_cast<int>(std::ceil(std::pow(20000.0, 0.2) - 1e-9)));
    CHECK(slicing_parameter(20000, 1.0, 1, true) == 8);
}

TEST_CASE("locate is total over uniformly sampled contexts") {
    const Partition p = build_partition(3, 7);
    Rng rng = make_stream(99, 0, Stream::arrival);
    for (int i = 0; i < 100000; ++i) {
        std::vector<double> x(3);
        for (auto& v : x) v = uniform_double(rng);
        CHECK(locate_linear(p, x) < p.cell_count);
    }
}

TEST_CASE("contexts in the same cell are within sqrt(d)/m of each other") {
    const Partition p = build_partition(2, 5);
    Rng rng = make_stream(7, 0, Stream::arrival);
    const double bound = std::sqrt(2.0) / 5.0 + 1e-12;
    int same_cell_pairs = 0;
    for (int i = 0; i < 20000; ++i) {
        std::vector<double> a{uniform_double(rng), uniform_double(rng)};
        std::vector<double> b{uniform_double(rng), uniform_double(rng)};
        if (locate_linear(p, a) != locate_linear(p, b)) continue;
        ++same_cell_pairs;
        const double dx = a[0] - b[0], dy = a[1] - b[1];
        CHECK(std::sqrt(dx * dx + dy * dy) <= bound);
    }
    CHECK(same_cell_pairs > 0);
}

TEST_CASE("coords <-> linear round-trips over every cell") {
    for (const Partition p : {build_partition(3, 9), build_partition(2, 1000), build_partition(1, 12)}) {
        for (std::uint64_t l = 0; l < p.cell_count; ++l) {
            const HypercubeIndex idx = cell_from_linear(p, l);
            std::uint64_t linear = 0, stride = 1;
            for (int j = 0; j < p.dim; ++j) {
                linear += stride * static_cast<std::uint64_t>(idx.coords[static_cast<std::size_t>(j)]);
                stride *= static_cast<std::uint64_t>(p.slices);
            }
            REQUIRE(linear == l);
        }
    }
}
