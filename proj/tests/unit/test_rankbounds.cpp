#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ploewner/rankbounds.hpp"

using namespace ploewner;

namespace {

Partition points(const std::vector<double>& left, const std::vector<double>& right) {
    std::vector<double> all = left;
    all.insert(all.end(), right.begin(), right.end());
    return explicit_partition(all, left, right);
}

} // namespace

TEST_CASE("xi matrices") {
    const Partition part = points({0.5, 1.5}, {2.0, 4.0});
    const MatR x0 = xi_matrix(0, part, 2, 3);
    CHECK(x0.rows() == 4);
    CHECK(x0.cols() == 6);
    CHECK(x0.isZero());
    CHECK(matrix_rank(x0) == 0);
    const MatR x1 = xi_matrix(1, part, 2, 3);
    CHECK(x1 == MatR::Ones(4, 6));
    CHECK(matrix_rank(x1) == 1);
    MatR core(2, 2);
    core << 2.5, 4.5, 3.5, 5.5;
    CHECK(xi_core(2, part) == core);
    CHECK(matrix_rank(xi_matrix(2, part, 4, 4)) == 2);
}

TEST_CASE("xi divided differences match the quotient form") {
    const Partition part = points({0.3, 1.7, -2.0}, {0.9, 3.1, 5.0, -0.4});
    for (std::size_t k = 0; k <= 6; ++k) {
        const MatR core = xi_core(k, part);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                const double a = part.left[i].value, b = part.right[j].value;
                const double q = (std::pow(a, k) - std::pow(b, k)) / (a - b);
                CHECK(core(i, j) == doctest::Approx(q).epsilon(1e-12));
            }
        }
        if (k >= 1) CHECK(matrix_rank(core) <= k);
    }
}

TEST_CASE("case studies") {
    const Partition p2 = points({0.5, 1.5}, {2.0, 4.0});
    const RankReport toy = affine_bounds(builtin("toy"), p2);
    CHECK(toy.rank_L == 2);
    CHECK(toy.rank_Ls == 6);
    CHECK(toy.rank_gamma == std::vector<std::size_t>{4, 2});
    CHECK(toy.bound_Ls == 8);
    CHECK(toy.affine_equality);
    CHECK(toy.ok());

    const RankReport mod = affine_bounds(builtin("toy_modified"), p2);
    CHECK(mod.rank_L == 3);
    CHECK(mod.rank_Ls == 6);
    CHECK(mod.bound_Ls == 10);
    CHECK(mod.ok());

    const Partition p4 = points({0.5, 1.5, 2.5, 3.5}, {2, 4, 6, 8});
    const RankReport poly = poly_bounds(builtin("polynomial"), p4);
    CHECK(poly.rank_L == 8);
    CHECK(poly.rank_Ls == 11);
    CHECK(poly.rank_gamma == std::vector<std::size_t>{4, 2, 3, 2});
    CHECK(poly.bound_L == 14);
    CHECK(poly.bound_Ls == 25);
    CHECK(poly.ok());
    CHECK_THROWS_AS(affine_bounds(builtin("polynomial"), p4), std::invalid_argument);
}

TEST_CASE("degree-one reduction and trivial models") {
    const Partition p2 = points({0.5, 1.5}, {2.0, 4.0});
    const RankReport a = affine_bounds(builtin("toy"), p2);
    const RankReport b = poly_bounds(builtin("toy"), p2);
    CHECK(a.bound_L == b.bound_L);
    CHECK(a.bound_Ls == b.bound_Ls);
    CHECK(b.rank_xi[0] == 0);
    CHECK(b.rank_xi[1] == 1);
    CHECK(b.bound_L == b.rank_gamma[1]);

    const ParametricModel scalar(SystemDims{0, 1, 1}, {MatR::Zero(1, 1), MatR::Ones(1, 1)});
    const RankReport s = affine_bounds(scalar, p2);
    CHECK(s.rank_L == 1);
    CHECK(s.rank_Ls <= 2);

    const ParametricModel constant(SystemDims{3, 1, 1}, {builtin("toy").gamma()[0]});
    const RankReport c = poly_bounds(constant, p2);
    CHECK(c.bound_L == 0);
    CHECK(c.rank_L == 0);
    CHECK(c.ok());
}

TEST_CASE("rank bounds against oracle ranks on random polynomial models") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> deg(1, 4), sz(1, 4), pts(2, 4);
    for (int trial = 0; trial < 20; ++trial) {
        const int h = deg(rng);
        const SystemDims dims{sz(rng), sz(rng) % 2 + 1, sz(rng) % 2 + 1};
        std::vector<MatR> gamma;
        for (int k = 0; k <= h; ++k) {
            gamma.push_back(oracle::random_int_matrix(rng, dims.block_rows(), dims.block_cols(), 1 + k % 2));
        }
        if (gamma.back().isZero()) gamma.back()(0, 0) = 1;
        const ParametricModel m(dims, gamma);
        const auto vals = oracle::distinct_dyadic(rng, 2 * static_cast<std::size_t>(pts(rng)), -8, 8);
        const std::vector<double> left(vals.begin(), vals.begin() + static_cast<long>(vals.size() / 2));
        const std::vector<double> right(vals.begin() + static_cast<long>(vals.size() / 2), vals.end());
        const RankReport rep = poly_bounds(m, points(left, right));
        const oracle::Loewner ref = oracle::loewner(m, left, right);
        CHECK(rep.rank_L == oracle::rank(ref.L));
        CHECK(rep.rank_Ls == oracle::rank(ref.Ls));
        CHECK(rep.holds.first);
        CHECK(rep.holds.second);
    }
}
