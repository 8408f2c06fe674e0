#pragma once

// Seeded generators for property tests.

#include "qproc/labeled_operator.hpp"
#include "qproc/random.hpp"

namespace gen {

inline qproc::Matrix complex_matrix(int rows, int cols, qproc::Rng &rng) {
    qproc::Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            m(i, j) = rng.complex_normal();
        }
    }
    return m;
}

inline qproc::Matrix hermitian(int d, qproc::Rng &rng) {
    const auto g = complex_matrix(d, d, rng);
    return 0.5 * (g + g.adjoint());
}

inline qproc::LabeledOperator random_operator(const qproc::LabelList &labels, qproc::Rng &rng) {
    const int d = static_cast<int>(qproc::total_dim(labels));
    return {labels, complex_matrix(d, d, rng)};
}

inline std::vector<int> dims_of(const qproc::LabelList &labels) {
    std::vector<int> out;
    for (const auto &l : labels) {
        out.push_back(l.dim);
    }
    return out;
}

}  // namespace gen
