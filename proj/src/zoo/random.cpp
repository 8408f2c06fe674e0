#include "qproc/random.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "qproc/error.hpp"
#include "qproc/tensor.hpp"

namespace qproc {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

cdouble Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

int Rng::index(int n) {
    if (n <= 0) {
        throw Error(ErrorCode::BadParams, "index range must be positive");
    }
    return static_cast<int>(uniform() * n) % n;
}

namespace {

Matrix ginibre(int rows, int cols, Rng &rng) {
    Matrix g(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            g(i, j) = rng.complex_normal();
        }
    }
    return g;
}

}  // namespace

Matrix random_unitary(int d, Rng &rng) {
    const Matrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        const cdouble rjj = r(j, j);
        const double mag = std::abs(rjj);
        if (mag > 0.0) {
            q.col(j) *= rjj / mag;
        }
    }
    return q;
}

Eigen::VectorXcd random_pure_vector(int d, Rng &rng) {
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) {
        v(i) = rng.complex_normal();
    }
    return v / v.norm();
}

LabeledOperator random_state(const LabelList &labels, Rng &rng, int rank) {
    const int d = static_cast<int>(total_dim(labels));
    const Matrix g = ginibre(d, rank > 0 ? rank : d, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    return LabeledOperator(labels, 0.5 * (rho + rho.adjoint()));
}

ChoiChannel random_channel(const SpaceLabel &in, const SpaceLabel &out, Rng &rng, int kraus) {
    if (kraus < 1 || out.dim * kraus < in.dim) {
        throw Error(ErrorCode::BadParams, "Stinespring dilation needs d_out * kraus >= d_in");
    }
    const int big = out.dim * kraus;
    const Matrix v = random_unitary(big, rng).leftCols(in.dim);
    // Kraus operator a: K_a(o, i) = V(o * kraus + a, i); |K_a>> = sum_i |i> (x) K_a|i>.
    Matrix choi = Matrix::Zero(in.dim * out.dim, in.dim * out.dim);
    for (int a = 0; a < kraus; ++a) {
        Eigen::VectorXcd vec(in.dim * out.dim);
        for (int i = 0; i < in.dim; ++i) {
            for (int o = 0; o < out.dim; ++o) {
                vec(i * out.dim + o) = v(o * kraus + a, i);
            }
        }
        choi += vec * vec.adjoint();
    }
    return {LabeledOperator({in, out}, choi), {in}, {out}};
}

Povm random_povm(const SpaceLabel &label, int outcomes, Rng &rng) {
    if (outcomes < 1) {
        throw Error(ErrorCode::BadParams, "a POVM needs at least one outcome");
    }
    std::vector<Matrix> g;
    Matrix sum = Matrix::Zero(label.dim, label.dim);
    for (int x = 0; x < outcomes; ++x) {
        const Matrix a = ginibre(label.dim, label.dim, rng);
        g.push_back(a * a.adjoint());
        sum += g.back();
    }
    const auto s = pseudo_inverse_sqrt(LabeledOperator({label}, sum)).matrix();
    Povm povm;
    for (const auto &e : g) {
        Matrix m = s * e * s;
        povm.elements.emplace_back(LabelList{label}, 0.5 * (m + m.adjoint()));
    }
    return povm;
}

MeasurePrepare random_measure_prepare(const SpaceLabel &in, const SpaceLabel &out, int outcomes, Rng &rng) {
    MeasurePrepare mp;
    mp.povm = random_povm(in, outcomes, rng);
    for (int x = 0; x < outcomes; ++x) {
        mp.states.push_back(random_state({out}, rng));
    }
    return mp;
}

ProcessTensor random_memoryless(int n_times, int d, Rng &rng) {
    std::vector<ChoiChannel> channels;
    for (int j = 1; j < n_times; ++j) {
        channels.push_back(random_channel(sys_out(j, d), sys_in(j + 1, d), rng, 1 + rng.index(3)));
    }
    return build_memoryless_product(channels, random_state({sys_in(1, d)}, rng));
}

std::vector<DilationStep> random_steps(int n_times, int d, int de, Rng &rng) {
    std::vector<DilationStep> steps;
    for (int j = 1; j < n_times; ++j) {
        steps.push_back({random_unitary(d * de, rng), d, de, d, de});
    }
    return steps;
}

}  // namespace qproc
