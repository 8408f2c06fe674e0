#include "qproc/sdp.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qproc/error.hpp"

namespace qproc::sdp {

namespace {

std::mutex registry_mutex;
std::shared_ptr<const ConicBackend> registry;

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd embed_block(const Matrix &m) {
    const auto n = m.rows();
    MatrixXd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = m.real();
    out.topRightCorner(n, n) = -m.imag();
    out.bottomLeftCorner(n, n) = m.imag();
    out.bottomRightCorner(n, n) = m.real();
    return out;
}

Matrix unembed_block(const MatrixXd &y) {
    const auto n = y.rows() / 2;
    const MatrixXd re = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
    const MatrixXd im = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
    Matrix out(n, n);
    out.real() = re;
    out.imag() = im;
    return out;
}

// Symmetric matrices as vectors with sqrt(2)-scaled off-diagonals, so dot products equal
// trace inner products.
struct SvecLayout {
    std::vector<int> dims;
    std::vector<Eigen::Index> offsets;
    Eigen::Index size = 0;

    explicit SvecLayout(const std::vector<int> &block_dims) : dims(block_dims) {
        for (int d : dims) {
            offsets.push_back(size);
            size += static_cast<Eigen::Index>(d) * (d + 1) / 2;
        }
    }

    void pack(const MatrixXd &m, std::size_t block, VectorXd &v) const {
        Eigen::Index k = offsets[block];
        const int d = dims[block];
        for (int j = 0; j < d; ++j) {
            v(k++) = m(j, j);
            for (int i = j + 1; i < d; ++i) {
                v(k++) = std::sqrt(2.0) * 0.5 * (m(i, j) + m(j, i));
            }
        }
    }

    MatrixXd unpack(const VectorXd &v, std::size_t block) const {
        Eigen::Index k = offsets[block];
        const int d = dims[block];
        MatrixXd m(d, d);
        for (int j = 0; j < d; ++j) {
            m(j, j) = v(k++);
            for (int i = j + 1; i < d; ++i) {
                m(i, j) = m(j, i) = v(k++) / std::sqrt(2.0);
            }
        }
        return m;
    }
};

class DouglasRachford final : public ConicBackend {
  public:
    explicit DouglasRachford(DouglasRachfordOptions options) : options_(options) {
    }

    std::string name() const override {
        return "douglas-rachford";
    }

    RealResult solve(const RealProblem &problem, double tolerance) const override;

  private:
    DouglasRachfordOptions options_;
};

RealResult DouglasRachford::solve(const RealProblem &problem, double tolerance) const {
    const SvecLayout layout(problem.block_dims);
    const auto m = static_cast<Eigen::Index>(problem.constraints.size());
    MatrixXd a = MatrixXd::Zero(m, layout.size);
    VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto &row = problem.constraints[static_cast<std::size_t>(i)];
        VectorXd v = VectorXd::Zero(layout.size);
        for (std::size_t blk = 0; blk < row.coefficients.size(); ++blk) {
            if (row.coefficients[blk].size() != 0) {
                layout.pack(row.coefficients[blk], blk, v);
            }
        }
        a.row(i) = v.transpose();
        b(i) = row.target;
    }

    RealResult result;
    // Row space of A through its SVD; rank by relative cutoff.
    Eigen::BDCSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd &s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > 1e-10 * std::max(smax, 1e-300)) {
        ++rank;
    }
    const MatrixXd u = svd.matrixU().leftCols(rank);
    const MatrixXd v = svd.matrixV().leftCols(rank);
    const VectorXd sinv = s.head(rank).cwiseInverse();
    // Least-norm solution of A x = b and the least-squares residual.
    const VectorXd ub = u.transpose() * b;
    const VectorXd x0 = v * sinv.cwiseProduct(ub);
    const VectorXd b_resid = b - a * x0;
    const double bnorm = std::max(1.0, b.norm());
    if (b_resid.norm() > tolerance * bnorm) {
        // Inconsistent equalities: y = -resid gives A^T y = 0 and b.y = -|resid|^2 < 0.
        result.status = Status::infeasible;
        result.dual.assign(b_resid.data(), b_resid.data() + b_resid.size());
        for (auto &y : result.dual) {
            y = -y;
        }
        result.detail = "equality constraints are inconsistent";
        return result;
    }

    auto project_affine = [&](const VectorXd &z) -> VectorXd { return z - v * (v.transpose() * z) + x0; };
    auto project_psd = [&](const VectorXd &z) -> VectorXd {
        VectorXd out(layout.size);
        for (std::size_t blk = 0; blk < layout.dims.size(); ++blk) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(layout.unpack(z, blk));
            const VectorXd lam = es.eigenvalues().cwiseMax(0.0);
            layout.pack(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose(), blk, out);
        }
        return out;
    };

    VectorXd z = VectorXd::Zero(layout.size);
    VectorXd x, y;
    for (int it = 1; it <= options_.max_iterations; ++it) {
        x = project_affine(z);
        y = project_psd(2.0 * x - z);
        z += y - x;
        if (it % options_.check_every != 0) {
            continue;
        }
        result.iterations = it;
        // y is PSD by construction; feasible once it also satisfies the equalities.
        const double primal = (a * y - b).norm();
        if (primal <= tolerance * bnorm) {
            result.status = Status::feasible;
            for (std::size_t blk = 0; blk < layout.dims.size(); ++blk) {
                result.witness.push_back(layout.unpack(y, blk));
            }
            result.detail = "converged";
            return result;
        }
        // Displacement g = x - y approximates the gap between the two sets. When it lies in
        // range(A^T), g = A^T w and y' = -w is a Farkas candidate.
        const VectorXd g = x - y;
        if (g.norm() <= tolerance) {
            continue;
        }
        const VectorXd w = u * sinv.cwiseProduct(v.transpose() * g);
        const VectorXd dual = -w;
        const VectorXd at_y = a.transpose() * dual;
        double lmin = std::numeric_limits<double>::infinity();
        for (std::size_t blk = 0; blk < layout.dims.size(); ++blk) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(layout.unpack(at_y, blk), Eigen::EigenvaluesOnly);
            lmin = std::min(lmin, es.eigenvalues()(0));
        }
        const double slack = std::max(0.0, -lmin);
        const double by = b.dot(dual);
        const bool bounded = slack == 0.0 || problem.trace_bound.has_value();
        const double margin = by + slack * problem.trace_bound.value_or(0.0);
        if (bounded && margin < -tolerance * dual.norm()) {
            result.status = Status::infeasible;
            result.dual.assign(dual.data(), dual.data() + dual.size());
            result.detail = "Farkas certificate from limiting displacement";
            return result;
        }
    }
    result.status = Status::unknown;
    result.detail = "no convergence within " + std::to_string(options_.max_iterations) + " iterations";
    return result;
}

}  // namespace

void register_backend(std::shared_ptr<const ConicBackend> backend) {
    std::lock_guard lock(registry_mutex);
    registry = std::move(backend);
}

std::shared_ptr<const ConicBackend> registered_backend() {
    std::lock_guard lock(registry_mutex);
    return registry;
}

std::shared_ptr<const ConicBackend> make_douglas_rachford_backend(DouglasRachfordOptions options) {
    return std::make_shared<DouglasRachford>(options);
}

RealProblem embed(const SdpFeasibility &problem) {
    RealProblem out;
    for (int d : problem.block_dims) {
        out.block_dims.push_back(2 * d);
    }
    for (const auto &c : problem.constraints) {
        if (c.coefficients.size() > problem.block_dims.size()) {
            throw Error(ErrorCode::DimensionMismatch, "constraint addresses more blocks than the problem has");
        }
        RealProblem::Row row;
        for (std::size_t blk = 0; blk < c.coefficients.size(); ++blk) {
            const auto &f = c.coefficients[blk];
            if (f.size() == 0) {
                row.coefficients.emplace_back();
                continue;
            }
            if (f.rows() != problem.block_dims[blk] || f.cols() != problem.block_dims[blk]) {
                throw Error(ErrorCode::DimensionMismatch, "constraint coefficient does not match its block");
            }
            if ((f - f.adjoint()).norm() > 1e-12 * std::max(1.0, f.norm())) {
                throw Error(ErrorCode::NotHermitian, "constraint functional is not Hermitian");
            }
            // tr(E(F) E(X)) = 2 tr(F X)
            row.coefficients.push_back(embed_block(f));
        }
        row.target = 2.0 * c.target;
        out.constraints.push_back(std::move(row));
    }
    if (problem.trace_bound) {
        out.trace_bound = 2.0 * *problem.trace_bound;
    }
    return out;
}

Result solve_feasibility(const SdpFeasibility &problem, double tolerance) {
    auto backend = registered_backend();
    if (!backend) {
        throw Error(ErrorCode::SolverUnavailable, "no conic backend registered for: " + problem.description);
    }
    const auto real = backend->solve(embed(problem), tolerance);
    Result out;
    out.status = real.status;
    out.iterations = real.iterations;
    out.detail = backend->name() + ": " + real.detail;
    // Embedded duals carry over unchanged: sum y_i E(F_i) >= 0 iff sum y_i F_i >= 0.
    out.dual = real.dual;
    for (const auto &w : real.witness) {
        out.witness.push_back(unembed_block(w));
    }
    return out;
}

WitnessCheck check_witness(const SdpFeasibility &problem, const std::vector<Matrix> &witness) {
    if (witness.size() != problem.block_dims.size()) {
        throw Error(ErrorCode::DimensionMismatch, "witness has the wrong number of blocks");
    }
    WitnessCheck check;
    check.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto &x : witness) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (x + x.adjoint()), Eigen::EigenvaluesOnly);
        check.min_eigenvalue = std::min(check.min_eigenvalue, es.eigenvalues()(0));
    }
    for (const auto &c : problem.constraints) {
        cdouble value = 0.0;
        for (std::size_t blk = 0; blk < c.coefficients.size(); ++blk) {
            if (c.coefficients[blk].size() != 0) {
                value += (c.coefficients[blk] * witness[blk]).trace();
            }
        }
        check.max_constraint_residual = std::max(check.max_constraint_residual, std::abs(value - c.target));
    }
    return check;
}

double certificate_margin(const SdpFeasibility &problem, const std::vector<double> &dual) {
    if (dual.size() != problem.constraints.size()) {
        throw Error(ErrorCode::DimensionMismatch, "dual vector has the wrong length");
    }
    double by = 0.0;
    double lmin = std::numeric_limits<double>::infinity();
    std::vector<Matrix> sum;
    for (int d : problem.block_dims) {
        sum.push_back(Matrix::Zero(d, d));
    }
    for (std::size_t i = 0; i < dual.size(); ++i) {
        const auto &c = problem.constraints[i];
        by += dual[i] * c.target;
        for (std::size_t blk = 0; blk < c.coefficients.size(); ++blk) {
            if (c.coefficients[blk].size() != 0) {
                sum[blk] += dual[i] * c.coefficients[blk];
            }
        }
    }
    for (const auto &s : sum) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
        lmin = std::min(lmin, es.eigenvalues()(0));
    }
    const double slack = std::max(0.0, -lmin);
    if (slack > 0.0 && !problem.trace_bound) {
        return std::numeric_limits<double>::infinity();
    }
    return by + slack * problem.trace_bound.value_or(0.0);
}

}  // namespace qproc::sdp
