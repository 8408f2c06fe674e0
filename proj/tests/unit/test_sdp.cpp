#include <gtest/gtest.h>

#include "qproc/error.hpp"
#include "qproc/sdp.hpp"

using namespace qproc;
using namespace qproc::sdp;

namespace {

Matrix unit(int d, int i, int j) {
    Matrix m = Matrix::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

// X >= 0 on C^2, tr X = 1, X_00 = a, Re X_01 = re01.
SdpFeasibility qubit_problem(double a, double re01) {
    SdpFeasibility p;
    p.block_dims = {2};
    p.constraints.push_back({{Matrix::Identity(2, 2)}, 1.0});
    p.constraints.push_back({{unit(2, 0, 0)}, a});
    p.constraints.push_back({{0.5 * (unit(2, 0, 1) + unit(2, 1, 0))}, re01});
    p.trace_bound = 1.0;
    p.description = "qubit test";
    return p;
}

class WithBackend : public ::testing::Test {
  protected:
    void SetUp() override {
        register_backend(make_douglas_rachford_backend());
    }
    void TearDown() override {
        register_backend(nullptr);
    }
};

}  // namespace

TEST(Sdp, NoBackendThrows) {
    register_backend(nullptr);
    try {
        solve_feasibility(qubit_problem(0.5, 0.0), 1e-8);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::SolverUnavailable);
    }
}

TEST(Sdp, EmbeddingRejectsNonHermitianFunctionals) {
    SdpFeasibility p;
    p.block_dims = {2};
    p.constraints.push_back({{unit(2, 0, 1)}, 0.0});
    EXPECT_THROW(embed(p), Error);
}

TEST(Sdp, EmbeddingDoublesSides) {
    const auto r = embed(qubit_problem(0.5, 0.1));
    ASSERT_EQ(r.block_dims.size(), 1u);
    EXPECT_EQ(r.block_dims[0], 4);
    EXPECT_EQ(r.constraints.size(), 3u);
    EXPECT_DOUBLE_EQ(r.constraints[0].target, 2.0);
}

TEST_F(WithBackend, FeasibleWitnessChecksOut) {
    const auto p = qubit_problem(0.7, 0.3);
    const auto r = solve_feasibility(p, 1e-9);
    ASSERT_EQ(r.status, Status::feasible) << r.detail;
    const auto c = check_witness(p, r.witness);
    EXPECT_GE(c.min_eigenvalue, -1e-8);
    EXPECT_LE(c.max_constraint_residual, 1e-8);
}

TEST_F(WithBackend, InfeasibleHasVerifiedCertificate) {
    // |X_01| <= sqrt(X_00 X_11) = sqrt(0.09) < 0.45
    const auto p = qubit_problem(0.9, 0.45);
    const auto r = solve_feasibility(p, 1e-9);
    ASSERT_EQ(r.status, Status::infeasible) << r.detail;
    EXPECT_LT(certificate_margin(p, r.dual), 0.0);
}

TEST_F(WithBackend, InconsistentEqualities) {
    SdpFeasibility p;
    p.block_dims = {2};
    p.constraints.push_back({{Matrix::Identity(2, 2)}, 1.0});
    p.constraints.push_back({{2.0 * Matrix::Identity(2, 2)}, 3.0});
    const auto r = solve_feasibility(p, 1e-9);
    EXPECT_EQ(r.status, Status::infeasible);
}

TEST_F(WithBackend, TwoBlocks) {
    // X, Y >= 0 on C^2, tr X + tr Y = 1, X_11 = 0.25, Y_00 = 0.5
    SdpFeasibility p;
    p.block_dims = {2, 2};
    p.constraints.push_back({{Matrix::Identity(2, 2), Matrix::Identity(2, 2)}, 1.0});
    p.constraints.push_back({{unit(2, 1, 1), Matrix()}, 0.25});
    p.constraints.push_back({{Matrix(), unit(2, 0, 0)}, 0.5});
    const auto r = solve_feasibility(p, 1e-9);
    ASSERT_EQ(r.status, Status::feasible) << r.detail;
    EXPECT_LE(check_witness(p, r.witness).max_constraint_residual, 1e-8);
}
