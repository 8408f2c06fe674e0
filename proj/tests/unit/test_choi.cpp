#include <gtest/gtest.h>

#include "../support/gen.hpp"
#include "qproc/choi.hpp"
#include "qproc/error.hpp"
#include "qproc/tensor.hpp"

using namespace qproc;

namespace {

template <class F>
void expect_code(F &&f, ErrorCode code) {
    try {
        f();
        FAIL() << "expected " << to_string(code);
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

Matrix projector(int d, int i) {
    Matrix m = Matrix::Zero(d, d);
    m(i, i) = 1.0;
    return m;
}

}  // namespace

TEST(Choi, IdentityIsUnnormalisedMaxEntangled) {
    const auto id = choi_identity(sys_out(1, 2), sys_in(2, 2));
    Eigen::Vector4cd phi(1, 0, 0, 1);
    EXPECT_LT((id.op.matrix() - phi * phi.adjoint()).norm(), 1e-15);
    EXPECT_TRUE(is_cptp(id));
}

TEST(Choi, ChannelActionMatchesConjugation) {
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix u = random_unitary(3, rng);
        const auto ch = choi_unitary(u, sys_out(1, 3), sys_in(2, 3));
        EXPECT_TRUE(is_cptp(ch));
        const auto rho = random_state({sys_out(1, 3)}, rng);
        const auto out = link_product(rho, ch.op);
        EXPECT_EQ(out.labels(), (LabelList{sys_in(2, 3)}));
        EXPECT_LT((out.matrix() - u * rho.matrix() * u.adjoint()).norm(), 1e-12);
    }
}

TEST(Choi, NonUnitaryRejected) {
    expect_code([] { choi_unitary(Matrix::Identity(2, 2) * 1.1, sys_out(1, 2), sys_in(2, 2)); }, ErrorCode::NotUnitary);
}

TEST(Choi, LinkProductLimits) {
    Rng rng(22);
    const auto a = gen::random_operator({sys_in(1, 2)}, rng);
    const auto b = gen::random_operator({sys_out(1, 3)}, rng);
    // no shared wires: tensor product
    EXPECT_LT((link_product(a, b).matrix() - tensor_product(a, b).matrix()).norm(), 1e-14);
    // all wires shared: tr(A B^T)
    const auto c = gen::random_operator({sys_in(1, 2)}, rng);
    const auto s = link_product(a, c);
    EXPECT_EQ(s.rank(), 0u);
    EXPECT_NEAR(std::abs(s.matrix()(0, 0) - (a.matrix() * c.matrix().transpose()).trace()), 0.0, 1e-12);
    expect_code([&] { link_product(a, gen::random_operator({sys_in(1, 3)}, rng)); }, ErrorCode::DimensionMismatch);
}

TEST(Choi, LinkProductAssociativeAndCommutative) {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = gen::random_operator({sys_in(1, 2), sys_out(1, 2)}, rng);
        const auto b = gen::random_operator({sys_out(1, 2), sys_in(2, 3)}, rng);
        const auto c = gen::random_operator({sys_in(2, 3), sys_out(2, 2)}, rng);
        const auto left = link_product(link_product(a, b), c);
        const auto right = link_product(a, link_product(b, c));
        EXPECT_LT((left - right).matrix().norm(), 1e-10 * left.matrix().norm());
        const auto ab = link_product(a, b);
        EXPECT_LT((ab - link_product(b, a)).matrix().norm(), 1e-10 * ab.matrix().norm());
    }
}

TEST(Choi, ComposedChannelsStayCptp) {
    Rng rng(24);
    const auto f = random_channel(sys_out(1, 2), sys_in(2, 3), rng, 2);
    const auto g = random_channel(sys_in(2, 3), sys_out(2, 2), rng, 3);
    ChoiChannel gf{link_product(f.op, g.op), {sys_out(1, 2)}, {sys_out(2, 2)}};
    EXPECT_TRUE(is_cptp(gf));
    EXPECT_LT(tp_defect(gf), 1e-12);
}

TEST(Choi, TraceAndPrepare) {
    Rng rng(25);
    const auto sigma = random_state({sys_in(2, 2)}, rng);
    const auto ch = choi_trace_and_prepare(sigma, {sys_out(1, 3)});
    EXPECT_TRUE(is_cptp(ch));
    const auto rho = random_state({sys_out(1, 3)}, rng);
    EXPECT_LT((link_product(rho, ch.op) - sigma).matrix().norm(), 1e-12);
    expect_code([&] { choi_trace_and_prepare(2.0 * sigma, {sys_out(1, 3)}); }, ErrorCode::NotAState);
}

TEST(Choi, MeasurePrepare) {
    const SpaceLabel in = sys_out(1, 2);
    const SpaceLabel out = sys_in(2, 2);
    Povm z{{LabeledOperator({in}, projector(2, 0)), LabeledOperator({in}, projector(2, 1))}};
    const std::vector<LabeledOperator> flips = {LabeledOperator({out}, projector(2, 1)),
                                                LabeledOperator({out}, projector(2, 0))};
    const auto ch = choi_ebc(flips, z);
    EXPECT_TRUE(is_cptp(ch));
    const auto r = link_product(LabeledOperator({in}, projector(2, 0)), ch.op);
    EXPECT_LT((r.matrix() - projector(2, 1)).norm(), 1e-14);
    // entanglement breaking: the Choi operator is PPT
    EXPECT_GE(min_eigenvalue(partial_transpose(ch.op, {in})), -1e-12);

    Povm bad{{LabeledOperator({in}, projector(2, 0))}};
    expect_code([&] { validate_povm(bad); }, ErrorCode::InvalidPovm);
    expect_code([&] { choi_ebc({flips[0]}, z); }, ErrorCode::LengthMismatch);
    expect_code([&] { choi_ebc({flips[0], 0.5 * flips[1]}, z); }, ErrorCode::NotAState);
}

TEST(Choi, RandomPovmAndChannelValid) {
    Rng rng(26);
    for (int trial = 0; trial < 10; ++trial) {
        EXPECT_NO_THROW(validate_povm(random_povm(sys_in(1, 3), 1 + trial % 4, rng)));
        EXPECT_TRUE(is_cptp(random_channel(sys_out(1, 2), sys_in(2, 3), rng, 1 + trial % 3)));
    }
}
