#pragma once

// Feasibility SDPs over complex Hermitian blocks, solved through a swappable real-symmetric
// conic backend.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qproc/labeled_operator.hpp"

namespace qproc::sdp {

/// sum_b tr(coefficients[b] X_b) = target. Empty coefficient matrices mean "block not involved".
struct Constraint {
    std::vector<Matrix> coefficients;
    double target = 0.0;
};

/// Find Hermitian X_b >= 0 (sides block_dims[b]) satisfying every constraint.
struct SdpFeasibility {
    std::vector<int> block_dims;
    std::vector<Constraint> constraints;
    /// Upper bound on sum_b tr X_b over the feasible set, if known. Lets approximate dual
    /// certificates be verified rigorously.
    std::optional<double> trace_bound;
    std::string description;
};

enum class Status { feasible, infeasible, unknown };

struct Result {
    Status status = Status::unknown;
    /// Feasible: the blocks found.
    std::vector<Matrix> witness;
    /// Infeasible: y with sum_i y_i F_i >= 0 and sum_i y_i b_i < 0.
    std::vector<double> dual;
    int iterations = 0;
    std::string detail;
};

/// Real-symmetric form handed to backends: block sides are doubled by the embedding
/// M -> [[Re M, -Im M], [Im M, Re M]], and every functional is scaled accordingly.
struct RealProblem {
    std::vector<int> block_dims;
    struct Row {
        std::vector<Eigen::MatrixXd> coefficients;
        double target = 0.0;
    };
    std::vector<Row> constraints;
    std::optional<double> trace_bound;
};

struct RealResult {
    Status status = Status::unknown;
    std::vector<Eigen::MatrixXd> witness;
    std::vector<double> dual;
    int iterations = 0;
    std::string detail;
};

class ConicBackend {
  public:
    virtual ~ConicBackend() = default;
    virtual std::string name() const = 0;
    virtual RealResult solve(const RealProblem &problem, double tolerance) const = 0;
};

/// Process-wide backend used by solve_feasibility. Passing nullptr unregisters.
void register_backend(std::shared_ptr<const ConicBackend> backend);
std::shared_ptr<const ConicBackend> registered_backend();

struct DouglasRachfordOptions {
    int max_iterations = 50000;
    int check_every = 25;
};

/// Built-in first-order backend: alternating reflections between the affine constraint set and
/// the PSD cone, with Farkas certificates read off the limiting displacement.
std::shared_ptr<const ConicBackend> make_douglas_rachford_backend(DouglasRachfordOptions options = {});

RealProblem embed(const SdpFeasibility &problem);

/// Throws SolverUnavailable when no backend is registered.
Result solve_feasibility(const SdpFeasibility &problem, double tolerance);

/// Independent checks on solver output against the complex problem.
struct WitnessCheck {
    double min_eigenvalue = 0.0;
    double max_constraint_residual = 0.0;
};
WitnessCheck check_witness(const SdpFeasibility &problem, const std::vector<Matrix> &witness);

/// Returns the margin sum_i y_i b_i + max(0, -lambda_min(sum_i y_i F_i)) * trace_bound, which
/// certifies infeasibility when negative. Without a trace bound the PSD part must hold exactly.
double certificate_margin(const SdpFeasibility &problem, const std::vector<double> &dual);

}  // namespace qproc::sdp
