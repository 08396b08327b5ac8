#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "tfock/probability.hpp"
#include "tfock/rng.hpp"

using namespace tfock;

namespace {

WickWord random_word(const Model& m, Rng& rng, int len, const std::vector<int>& sectors) {
    WickWord w;
    for (int i = 0; i < len; ++i) {
        WickLetter l;
        l.sector = sectors[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(sectors.size()) - 1))];
        l.vec = VectorXcd::Zero(m.dim());
        const int off = m.sector_offset(l.sector);
        for (int c = 0; c < m.sector_dim(l.sector); ++c) l.vec(off + c) = rng.cnormal();
        w.letters.push_back(l);
    }
    return w;
}

}  // namespace

TEST_CASE("second moments reproduce the deformed pairing") {
    const Model m = build_model(testutil::two_sector_spec());
    const TwistKernel k = build_kernel(m);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const MomentQuery q = basis_query(m, {i, j});
            const cplx expected = m.deformed_gram()(i, j);
            CHECK(std::abs(vacuum_moment(m, k.basis(), k, q) - expected) < 1e-12);
            CHECK(std::abs(pair_partition_moment(m, q) - expected) < 1e-12);
        }
}

TEST_CASE("the crossing moment equals the deformation parameter") {
    const Model m = build_model(testutil::flat_single_sector_spec());
    const TwistKernel k = build_kernel(m);
    const MomentQuery q = basis_query(m, {0, 1, 0, 1});
    CHECK(std::abs(vacuum_moment(m, k.basis(), k, q) - 0.5) < 1e-10);
    CHECK(std::abs(pair_partition_moment(m, q) - 0.5) < 1e-12);
}

TEST_CASE("odd moments vanish and overflowing orders are refused") {
    const Model m = build_model(testutil::two_sector_spec());
    const TwistKernel k = build_kernel(m);
    CHECK(std::abs(vacuum_moment(m, k.basis(), k, basis_query(m, {0, 1, 2}))) < 1e-14);
    CHECK(std::abs(pair_partition_moment(m, basis_query(m, {0, 1, 2}))) == 0.0);

    const std::vector<int> eight(8, 0);
    CHECK_NOTHROW(vacuum_moment(m, k.basis(), k, basis_query(m, eight)));
    const std::vector<int> nine(9, 0);
    CHECK_THROWS_AS(vacuum_moment(m, k.basis(), k, basis_query(m, nine)), std::invalid_argument);
    CHECK_THROWS_AS(pair_partition_moment(m, MomentQuery{{VectorXcd::Ones(3)}, {-1}}),
                    std::invalid_argument);
}

TEST_CASE("matrix moments match the pairing oracle at every order") {
    const Model m = build_model(testutil::two_sector_spec());
    const TwistKernel k = build_kernel(m);
    double worst = 0.0;
    for (int ord = 1; ord <= 6; ++ord) {
        std::vector<int> tuple(ord, 0);
        for (;;) {
            const MomentQuery q = basis_query(m, tuple);
            worst = std::max(worst,
                             std::abs(vacuum_moment(m, k.basis(), k, q) - pair_partition_moment(m, q)));
            int pos = ord - 1;
            while (pos >= 0 && ++tuple[pos] == 3) tuple[pos--] = 0;
            if (pos < 0) break;
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("a trivial flow makes the vacuum state tracial") {
    const Model m = build_model(testutil::two_sector_flat_spec());
    const TwistKernel k = build_kernel(m);
    const WordBasis& b = k.basis();
    Rng rng(17);
    std::vector<FockOperator> samples;
    for (int i = 0; i < 6; ++i) samples.push_back(wick_s(m, b, random_word(m, rng, 1 + i % 3, {0, 1})));
    for (int i = 0; i < 4; ++i) {
        const FockOperator x = wick_s(m, b, random_word(m, rng, 1 + i % 3, {0, 1}));
        CHECK(centralizer_residual(b, x, samples) <= 1e-10);
    }
}

TEST_CASE("flow-fixed words sit in the centralizer, moved words do not") {
    const Model m = build_model(testutil::two_sector_spec());
    const TwistKernel k = build_kernel(m);
    const WordBasis& b = k.basis();
    Rng rng(19);
    std::vector<FockOperator> samples;
    for (int i = 0; i < 6; ++i) samples.push_back(wick_s(m, b, random_word(m, rng, 1 + i % 3, {0, 1})));

    // letters of the rotation-free sector generate central words
    for (int i = 0; i < 3; ++i) {
        const FockOperator x = wick_s(m, b, random_word(m, rng, 1 + i % 2, {1}));
        CHECK(centralizer_residual(b, x, samples) <= 1e-9);
    }

    // a letter inside the rotation block is genuinely displaced
    const FockOperator moved = wick_s(m, b, WickWord::from_basis(b, {0}));
    CHECK(centralizer_residual(b, moved, samples) > 1e-6);
}

TEST_CASE("the oscillation probe starts at one and stays bounded") {
    ModelSpec spec = testutil::trivial_spec();
    spec.level = 6;
    const Model m = build_model(spec);
    const TwistKernel k = build_kernel(m);
    VectorXcd xi = VectorXcd::Zero(2);
    xi(0) = 1;
    const std::vector<double> grid = {0.0, 0.5, 1.0, 2.0, 5.0};
    const std::vector<double> vals = oscillation_probe(m, k.basis(), k, xi, grid);
    REQUIRE(vals.size() == grid.size());
    CHECK(std::abs(vals[0] - 1.0) < 1e-12);
    for (const double v : vals) CHECK(v <= 1.0 + 1e-12);
    // free-field value |J_1(2t)/t| at t = 1, well inside the quadrature range
    CHECK(std::abs(vals[2] - 0.5767248077568734) < 1e-6);
    // high-frequency decay
    CHECK(vals[4] < 0.5);

    // vectors moved by the flow are rejected
    const Model mb = build_model(testutil::single_sector_spec());
    const TwistKernel kb = build_kernel(mb);
    CHECK_THROWS_AS(oscillation_probe(mb, kb.basis(), kb, xi, grid), std::invalid_argument);
}
