#include <gtest/gtest.h>

#include <numeric>

#include "../support/gen.hpp"
#include "qproc/kernels.hpp"

using namespace qproc;
namespace k = qproc::kernels;

namespace {

struct Case {
    std::vector<std::size_t> dims;
    std::size_t side() const {
        return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    }
};

const std::vector<Case> kCases = {{{2}}, {{2, 3}}, {{3, 2, 2}}, {{2, 2, 2, 2, 2}}, {{4, 1, 3}}};

}  // namespace

// The OpenMP kernels must agree bit for bit with the serial reference: both do the same
// additions in the same order per output element.
TEST(Kernels, SerialAndParallelAgree) {
    Rng rng(11);
    for (const auto &c : kCases) {
        const int n = static_cast<int>(c.side());
        const Matrix m = gen::complex_matrix(n, n, rng);
        const std::size_t r = c.dims.size();
        std::vector<std::size_t> order(r);
        std::iota(order.begin(), order.end(), 0);
        std::reverse(order.begin(), order.end());
        EXPECT_EQ(k::serial::permute(m, c.dims, order), k::omp::permute(m, c.dims, order));
        for (std::size_t mask = 0; mask < (1u << r); ++mask) {
            std::vector<char> bits(r);
            for (std::size_t i = 0; i < r; ++i) {
                bits[i] = static_cast<char>((mask >> i) & 1);
            }
            EXPECT_EQ(k::serial::partial_trace(m, c.dims, bits), k::omp::partial_trace(m, c.dims, bits));
            EXPECT_EQ(k::serial::partial_transpose(m, c.dims, bits), k::omp::partial_transpose(m, c.dims, bits));
        }
        const Matrix small = gen::complex_matrix(3, 3, rng);
        EXPECT_EQ(k::serial::kron(m, small), k::omp::kron(m, small));
        const std::size_t dx = c.dims.front();
        const std::size_t dy = c.side() / dx;
        const Matrix re = k::serial::realign(m, dx, dy);
        EXPECT_EQ(re, k::omp::realign(m, dx, dy));
        EXPECT_EQ(k::serial::unrealign(re, dx, dy), m);
        EXPECT_EQ(k::omp::unrealign(re, dx, dy), m);
    }
}

TEST(Kernels, PermuteInverse) {
    Rng rng(12);
    const std::vector<std::size_t> dims = {2, 3, 4};
    const Matrix m = gen::complex_matrix(24, 24, rng);
    const std::vector<std::size_t> order = {1, 2, 0};
    const std::vector<std::size_t> permuted_dims = {3, 4, 2};
    const std::vector<std::size_t> inverse = {2, 0, 1};
    EXPECT_EQ(k::omp::permute(k::omp::permute(m, dims, order), permuted_dims, inverse), m);
}

TEST(Kernels, ThreadCountPositive) {
    EXPECT_GE(k::max_threads(), 1);
}
