#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "../support/gen.hpp"
#include "../support/oracles.hpp"
#include "qproc/error.hpp"
#include "qproc/tensor.hpp"

using namespace qproc;

namespace {

const LabelList kWires = {sys_in(2, 2), sys_out(1, 3), sys_in(1, 2)};

template <class F>
void expect_code(F &&f, ErrorCode code) {
    try {
        f();
        FAIL() << "expected " << to_string(code);
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

}  // namespace

TEST(LabeledOperator, RejectsDuplicatesAndBadShapes) {
    expect_code([] { LabeledOperator({sys_in(1, 2), sys_in(1, 2)}, Matrix::Identity(4, 4)); }, ErrorCode::DuplicateLabel);
    expect_code([] { LabeledOperator({sys_in(1, 2)}, Matrix::Identity(3, 3)); }, ErrorCode::DimensionMismatch);
}

TEST(LabeledOperator, AdditionAlignsLabelOrder) {
    Rng rng(1);
    const auto a = gen::random_operator({sys_in(1, 2), sys_out(1, 3)}, rng);
    const auto swapped = permute(a, {sys_out(1, 3), sys_in(1, 2)});
    EXPECT_LT((a - swapped).matrix().norm(), 1e-14);
    expect_code([&] { (void)(a + LabeledOperator::identity({sys_in(1, 2), sys_out(2, 3)})); }, ErrorCode::LabelMismatch);
}

TEST(Tensor, ProductMatchesKronecker) {
    Rng rng(2);
    const auto a = gen::random_operator({sys_in(2, 2)}, rng);
    const auto b = gen::random_operator({sys_out(1, 3)}, rng);
    const auto ab = tensor_product(a, b);
    EXPECT_EQ(ab.labels(), (LabelList{sys_in(2, 2), sys_out(1, 3)}));
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            EXPECT_NEAR(std::abs(ab.matrix()(i, j) - a.matrix()(i / 3, j / 3) * b.matrix()(i % 3, j % 3)), 0.0, 1e-14);
        }
    }
    expect_code([&] { tensor_product(a, a); }, ErrorCode::DuplicateLabel);
}

TEST(Tensor, PartialTraceMatchesOracle) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = gen::random_operator(kWires, rng);
        for (int mask = 0; mask < 8; ++mask) {
            LabelList over;
            std::vector<bool> bits;
            for (int k = 0; k < 3; ++k) {
                bits.push_back((mask >> k) & 1);
                if (bits.back()) {
                    over.push_back(kWires[k]);
                }
            }
            const auto lib = partial_trace(a, over);
            const auto ref = oracle::partial_trace(a.matrix(), gen::dims_of(kWires), bits);
            ASSERT_EQ(lib.matrix().rows(), ref.rows());
            EXPECT_LT((lib.matrix() - ref).norm(), 1e-12);
        }
    }
    expect_code([&] { partial_trace(LabeledOperator::identity(kWires), {sys_in(5, 2)}); }, ErrorCode::LabelNotFound);
}

TEST(Tensor, PartialTransposeMatchesOracleAndIsInvolution) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = gen::random_operator(kWires, rng);
        const LabelList over = {kWires[trial % 3]};
        std::vector<bool> bits(3, false);
        bits[trial % 3] = true;
        const auto lib = partial_transpose(a, over);
        EXPECT_LT((lib.matrix() - oracle::partial_transpose(a.matrix(), gen::dims_of(kWires), bits)).norm(), 1e-12);
        EXPECT_LT((partial_transpose(lib, over).matrix() - a.matrix()).norm(), 1e-12);
    }
}

TEST(Tensor, PermuteRoundTripAndErrors) {
    Rng rng(5);
    const auto a = gen::random_operator(kWires, rng);
    const LabelList order = {kWires[2], kWires[0], kWires[1]};
    const auto b = permute(a, order);
    EXPECT_EQ(b.labels(), order);
    EXPECT_LT((permute(b, kWires).matrix() - a.matrix()).norm(), 1e-14);
    // trace is invariant, as is the spectrum
    EXPECT_NEAR(std::abs(a.trace() - b.trace()), 0.0, 1e-12);
    expect_code([&] { permute(a, {kWires[0], kWires[1]}); }, ErrorCode::BadPermutation);
}

TEST(Tensor, PsdAndHermiticity) {
    Rng rng(6);
    const auto rho = random_state(kWires, rng);
    EXPECT_TRUE(is_psd(rho));
    EXPECT_TRUE(is_hermitian(rho.matrix()));
    EXPECT_FALSE(is_psd(-1.0 * rho));
    const auto g = gen::random_operator(kWires, rng);
    EXPECT_FALSE(is_hermitian(g.matrix()));
    expect_code([&] { hermitian_eigen(g); }, ErrorCode::NotHermitian);
}

TEST(Tensor, TraceNormAndDistance) {
    Rng rng(7);
    const auto h = LabeledOperator(kWires, gen::hermitian(12, rng));
    EXPECT_NEAR(trace_norm(h), oracle::trace_norm(h.matrix()), 1e-10);
    const auto a = random_state(kWires, rng);
    const auto b = random_state(kWires, rng);
    const double d = trace_distance(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 2.0 + 1e-12);  // unhalved
    EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-14);
}

TEST(Tensor, RelativeEntropy) {
    Rng rng(8);
    const LabelList w = {sys_in(1, 2), sys_out(1, 2)};
    const auto a = random_state(w, rng);
    const auto b = random_state(w, rng);
    EXPECT_NEAR(relative_entropy(a, a), 0.0, 1e-12);
    EXPECT_NEAR(relative_entropy(a, b), oracle::relative_entropy_bits(a.matrix(), b.matrix()), 1e-9);
    EXPECT_GT(relative_entropy(a, b), 0.0);
    // support of a not inside support of b
    Matrix p0 = Matrix::Zero(4, 4);
    p0(0, 0) = 1.0;
    EXPECT_TRUE(std::isinf(relative_entropy(a, LabeledOperator(w, p0))));
    expect_code([&] { relative_entropy(-1.0 * a, b); }, ErrorCode::NotPSD);
    expect_code([&] { relative_entropy(a, random_state({sys_in(1, 2), sys_out(2, 2)}, rng)); }, ErrorCode::LabelMismatch);
}

TEST(Tensor, PseudoInverseSqrtOnSupport) {
    Rng rng(9);
    const LabelList w = {sys_in(1, 3)};
    const auto rho = random_state(w, rng, 2);
    const auto r = pseudo_inverse_sqrt(rho);
    const Matrix proj = r.matrix() * rho.matrix() * r.matrix();
    EXPECT_LT((proj - support_projector(rho).matrix()).norm(), 1e-9);
    EXPECT_NEAR(proj.trace().real(), 2.0, 1e-9);
    const auto s = psd_sqrt(rho);
    EXPECT_LT((s.matrix() * s.matrix() - rho.matrix()).norm(), 1e-12);
}
