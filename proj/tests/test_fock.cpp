#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "tfock/fock.hpp"
#include "tfock/rng.hpp"

using namespace tfock;

TEST_CASE("level kernels collapse to the identity without deformation") {
    const Model m = build_model(testutil::trivial_spec());
    const TwistKernel k = build_kernel(m);
    for (int n = 0; n <= k.levels(); ++n)
        CHECK(spectral_norm(k.p(n) - MatrixXcd::Identity(k.basis().size(n), k.basis().size(n))) < 1e-13);
}

TEST_CASE("the level-2 kernel splits into 1 +/- q eigenspaces") {
    const Model m = build_model(testutil::flat_single_sector_spec());
    const TwistKernel k = build_kernel(m);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(k.p(2));
    REQUIRE(es.info() == Eigen::Success);
    CHECK(std::abs(es.eigenvalues()(0) - 0.5) < 1e-12);  // antisymmetric direction
    for (int i = 1; i < 4; ++i) CHECK(std::abs(es.eigenvalues()(i) - 1.5) < 1e-12);
}

TEST_CASE("the kernel floor is 1 - |q| at level 2") {
    ModelSpec s = testutil::flat_single_sector_spec();
    s.q(0, 0) = 0.9;
    s.level = 3;
    const Model m = build_model(s);
    const PositivityReport rep = check_positivity(m, build_kernel(m));
    CHECK(std::abs(rep.min_eig[2] - 0.1) < 1e-12);
    CHECK(rep.positive);

    const Model m0 = build_model(testutil::trivial_spec());
    for (const double e : check_positivity(m0, build_kernel(m0)).min_eig)
        CHECK(std::abs(e - 1.0) < 1e-12);
}

TEST_CASE("the ladder agrees with the direct symmetric-group sum") {
    const Model m = build_model(testutil::two_sector_spec());
    const TwistKernel k = build_kernel(m, -1, true);
    CHECK(k.verify_residual() <= 1e-10);
    CHECK((k.p(3) - p_matrix_bruteforce(m, 3)).norm() < 1e-12);
}

TEST_CASE("the twist is a scaled flip of letters") {
    const Model m = build_model(testutil::two_sector_spec());
    const MatrixXcd t = twist_matrix(m);
    REQUIRE(t.rows() == 9);
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
            VectorXcd in = VectorXcd::Zero(9);
            in(a * 3 + c) = 1;
            const VectorXcd out = t * in;
            for (int idx = 0; idx < 9; ++idx) {
                const double expect = (idx == c * 3 + a) ? m.q(m.sector_of(a), m.sector_of(c)) : 0.0;
                CHECK(std::abs(out(idx) - expect) < 1e-14);
            }
        }
    CHECK(spectral_norm(extend_twist(m, 1, 2) - t) < 1e-14);
}

TEST_CASE("the braid identity holds on every reference model") {
    for (const ModelSpec& s :
         {testutil::trivial_spec(), testutil::single_sector_spec(), testutil::two_sector_spec()}) {
        const Model m = build_model(s);
        CHECK(check_yang_baxter(m) <= 1e-13);
    }
}

TEST_CASE("permutation words evaluate quasi-multiplicatively") {
    const Model m = build_model(testutil::two_sector_spec());
    CHECK(spectral_norm(pi_sigma(m, {1, 0}) - twist_matrix(m)) < 1e-14);
    CHECK(spectral_norm(p_matrix_bruteforce(m, 2) - MatrixXcd::Identity(9, 9) - twist_matrix(m)) < 1e-14);

    const MatrixXcd t1 = extend_twist(m, 1, 3), t2 = extend_twist(m, 2, 3);
    CHECK(spectral_norm(pi_sigma(m, {2, 1, 0}) - t1 * t2 * t1) < 1e-13);

    // every permutation word maps a basis word to words over the same letters
    const WordBasis b(m, 3);
    const MatrixXcd p = pi_sigma(m, {2, 0, 1});
    std::vector<int> w, wr;
    for (Eigen::Index col = 0; col < 27; ++col) {
        b.word_of(3, col, w);
        std::sort(w.begin(), w.end());
        for (Eigen::Index row = 0; row < 27; ++row) {
            if (std::abs(p(row, col)) < 1e-14) continue;
            b.word_of(3, row, wr);
            std::sort(wr.begin(), wr.end());
            CHECK(w == wr);
        }
    }
}

TEST_CASE("reduced words have inversion length") {
    CHECK(reduced_word({0, 1, 2}).empty());
    CHECK(reduced_word({1, 0}) == std::vector<int>{1});
    CHECK(reduced_word({2, 1, 0}).size() == 3);
}

TEST_CASE("kernel inner products are sesquilinear and normalized") {
    const Model m = build_model(testutil::two_sector_spec());
    const TwistKernel k = build_kernel(m);
    CHECK(std::abs(k.norm_T(FockVector::vacuum(k.basis())) - 1.0) < 1e-14);

    Rng rng(5);
    FockVector u = FockVector::zero(k.basis()), v = FockVector::zero(k.basis());
    for (int n = 0; n <= k.levels(); ++n) {
        u.lev[n] = rng.complex_vector(static_cast<int>(k.basis().size(n)));
        v.lev[n] = rng.complex_vector(static_cast<int>(k.basis().size(n)));
    }
    const cplx c(0.7, 0.2);
    FockVector cv = v;
    cv *= c;
    CHECK(std::abs(k.inner_T(u, cv) - c * k.inner_T(u, v)) < 1e-9);
    CHECK(std::abs(k.inner_T(u, v) - std::conj(k.inner_T(v, u))) < 1e-9);
    CHECK(k.norm_T(u) > 0.0);
}

TEST_CASE("word indexing is big endian in the first letter") {
    const Model m = build_model(testutil::two_sector_spec());
    const WordBasis b(m, 3);
    CHECK(b.index_of({1, 2, 0}) == 1 * 9 + 2 * 3 + 0);
    std::vector<int> w;
    b.word_of(3, 1 * 9 + 2 * 3 + 0, w);
    CHECK(w == std::vector<int>{1, 2, 0});
    CHECK(b.sector(0) == 0);
    CHECK(b.sector(2) == 1);
}
