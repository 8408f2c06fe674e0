#include "qproc/kernels.hpp"

#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qproc::kernels {

namespace {

using Index = Eigen::Index;
using cdouble_t = std::complex<double>;

std::vector<std::size_t> strides_of(Dims dims) {
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * dims[i];
    }
    return strides;
}

std::size_t product(Dims dims) {
    std::size_t p = 1;
    for (auto d : dims) {
        p *= d;
    }
    return p;
}

void to_digits(std::size_t index, Dims dims, std::vector<std::size_t> &digits) {
    digits.resize(dims.size());
    for (std::size_t i = dims.size(); i-- > 0;) {
        digits[i] = index % dims[i];
        index /= dims[i];
    }
}

std::size_t from_digits(const std::vector<std::size_t> &digits, Dims dims) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        index = index * dims[i] + digits[i];
    }
    return index;
}

// Offsets in the full index of every combination of the selected axes, enumerated in
// mixed-radix order of the selection.
std::vector<std::size_t> subset_offsets(Dims dims, const std::vector<std::size_t> &axes) {
    auto strides = strides_of(dims);
    std::vector<std::size_t> offsets{0};
    for (auto axis : axes) {
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * dims[axis]);
        for (auto base : offsets) {
            for (std::size_t d = 0; d < dims[axis]; ++d) {
                next.push_back(base + d * strides[axis]);
            }
        }
        offsets = std::move(next);
    }
    return offsets;
}

void split_axes(Mask mask, std::vector<std::size_t> &selected, std::vector<std::size_t> &rest) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
        (mask[i] ? selected : rest).push_back(i);
    }
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// ---------------------------------------------------------------------------
// Serial reference
// ---------------------------------------------------------------------------

namespace serial {

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            for (Index k = 0; k < b.rows(); ++k) {
                for (Index l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

Matrix permute(const Matrix &m, Dims dims, std::span<const std::size_t> order) {
    std::vector<std::size_t> new_dims(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        new_dims[i] = dims[order[i]];
    }
    const auto n = static_cast<Index>(product(dims));
    Matrix out(n, n);
    std::vector<std::size_t> rd, cd, ro(dims.size()), co(dims.size());
    for (Index r = 0; r < n; ++r) {
        to_digits(static_cast<std::size_t>(r), new_dims, rd);
        for (std::size_t i = 0; i < order.size(); ++i) {
            ro[order[i]] = rd[i];
        }
        const auto old_r = static_cast<Index>(from_digits(ro, dims));
        for (Index c = 0; c < n; ++c) {
            to_digits(static_cast<std::size_t>(c), new_dims, cd);
            for (std::size_t i = 0; i < order.size(); ++i) {
                co[order[i]] = cd[i];
            }
            out(r, c) = m(old_r, static_cast<Index>(from_digits(co, dims)));
        }
    }
    return out;
}

Matrix partial_trace(const Matrix &m, Dims dims, Mask traced) {
    std::vector<std::size_t> kept_dims;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (!traced[i]) {
            kept_dims.push_back(dims[i]);
        }
    }
    const auto kept = static_cast<Index>(product(kept_dims));
    Matrix out = Matrix::Zero(kept, kept);
    const auto n = static_cast<Index>(product(dims));
    std::vector<std::size_t> rd, cd;
    for (Index r = 0; r < n; ++r) {
        to_digits(static_cast<std::size_t>(r), dims, rd);
        for (Index c = 0; c < n; ++c) {
            to_digits(static_cast<std::size_t>(c), dims, cd);
            bool diagonal = true;
            std::size_t a = 0, b = 0;
            for (std::size_t i = 0; i < dims.size(); ++i) {
                if (traced[i]) {
                    diagonal = diagonal && rd[i] == cd[i];
                } else {
                    a = a * dims[i] + rd[i];
                    b = b * dims[i] + cd[i];
                }
            }
            if (diagonal) {
                out(static_cast<Index>(a), static_cast<Index>(b)) += m(r, c);
            }
        }
    }
    return out;
}

Matrix partial_transpose(const Matrix &m, Dims dims, Mask transposed) {
    const auto n = static_cast<Index>(product(dims));
    Matrix out(n, n);
    std::vector<std::size_t> rd, cd;
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) {
            to_digits(static_cast<std::size_t>(r), dims, rd);
            to_digits(static_cast<std::size_t>(c), dims, cd);
            for (std::size_t i = 0; i < dims.size(); ++i) {
                if (transposed[i]) {
                    std::swap(rd[i], cd[i]);
                }
            }
            out(r, c) = m(static_cast<Index>(from_digits(rd, dims)),
                          static_cast<Index>(from_digits(cd, dims)));
        }
    }
    return out;
}

Matrix realign(const Matrix &m, std::size_t dx, std::size_t dy) {
    const auto sx = static_cast<Index>(dx), sy = static_cast<Index>(dy);
    Matrix out(sx * sx, sy * sy);
    for (Index x = 0; x < sx; ++x)
        for (Index xp = 0; xp < sx; ++xp)
            for (Index y = 0; y < sy; ++y)
                for (Index yp = 0; yp < sy; ++yp)
                    out(x * sx + xp, y * sy + yp) = m(x * sy + y, xp * sy + yp);
    return out;
}

Matrix unrealign(const Matrix &m, std::size_t dx, std::size_t dy) {
    const auto sx = static_cast<Index>(dx), sy = static_cast<Index>(dy);
    Matrix out(sx * sy, sx * sy);
    for (Index x = 0; x < sx; ++x)
        for (Index xp = 0; xp < sx; ++xp)
            for (Index y = 0; y < sy; ++y)
                for (Index yp = 0; yp < sy; ++yp)
                    out(x * sy + y, xp * sy + yp) = m(x * sx + xp, y * sy + yp);
    return out;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP
// ---------------------------------------------------------------------------

namespace omp {

Matrix kron(const Matrix &a, const Matrix &b) {
    const Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    Matrix out(ar * br, ac * bc);
#pragma omp parallel for collapse(2) schedule(static)
    for (Index j = 0; j < ac; ++j) {
        for (Index l = 0; l < bc; ++l) {
            const Index col = j * bc + l;
            for (Index i = 0; i < ar; ++i) {
                const cdouble_t aij = a(i, j);
                for (Index k = 0; k < br; ++k) {
                    out(i * br + k, col) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

Matrix permute(const Matrix &m, Dims dims, std::span<const std::size_t> order) {
    // map[new index] = old index
    std::vector<std::size_t> axes(order.begin(), order.end());
    const auto map = subset_offsets(dims, axes);
    const auto n = static_cast<Index>(map.size());
    Matrix out(n, n);
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < n; ++c) {
        const auto oc = static_cast<Index>(map[c]);
        for (Index r = 0; r < n; ++r) {
            out(r, c) = m(static_cast<Index>(map[r]), oc);
        }
    }
    return out;
}

Matrix partial_trace(const Matrix &m, Dims dims, Mask traced) {
    std::vector<std::size_t> traced_axes, kept_axes;
    split_axes(traced, traced_axes, kept_axes);
    const auto kept_off = subset_offsets(dims, kept_axes);
    const auto traced_off = subset_offsets(dims, traced_axes);
    const auto k = static_cast<Index>(kept_off.size());
    const auto t = traced_off.size();
    Matrix out(k, k);
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < k; ++b) {
        for (Index a = 0; a < k; ++a) {
            cdouble_t acc = 0.0;
            for (std::size_t s = 0; s < t; ++s) {
                acc += m(static_cast<Index>(kept_off[a] + traced_off[s]),
                         static_cast<Index>(kept_off[b] + traced_off[s]));
            }
            out(a, b) = acc;
        }
    }
    return out;
}

Matrix partial_transpose(const Matrix &m, Dims dims, Mask transposed) {
    std::vector<std::size_t> tr_axes, kept_axes;
    split_axes(transposed, tr_axes, kept_axes);
    // Every full index is kept_part + transposed_part; tabulate both per index.
    const auto kept_off = subset_offsets(dims, kept_axes);
    const auto tr_off = subset_offsets(dims, tr_axes);
    const auto n = static_cast<Index>(product(dims));
    std::vector<std::size_t> kpart(n), tpart(n);
    for (std::size_t a = 0; a < kept_off.size(); ++a) {
        for (std::size_t s = 0; s < tr_off.size(); ++s) {
            const auto idx = kept_off[a] + tr_off[s];
            kpart[idx] = kept_off[a];
            tpart[idx] = tr_off[s];
        }
    }
    Matrix out(n, n);
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < n; ++c) {
        for (Index r = 0; r < n; ++r) {
            out(r, c) = m(static_cast<Index>(kpart[r] + tpart[c]), static_cast<Index>(kpart[c] + tpart[r]));
        }
    }
    return out;
}

Matrix realign(const Matrix &m, std::size_t dx, std::size_t dy) {
    const auto sx = static_cast<Index>(dx), sy = static_cast<Index>(dy);
    Matrix out(sx * sx, sy * sy);
#pragma omp parallel for collapse(2) schedule(static)
    for (Index y = 0; y < sy; ++y) {
        for (Index yp = 0; yp < sy; ++yp) {
            for (Index x = 0; x < sx; ++x) {
                for (Index xp = 0; xp < sx; ++xp) {
                    out(x * sx + xp, y * sy + yp) = m(x * sy + y, xp * sy + yp);
                }
            }
        }
    }
    return out;
}

Matrix unrealign(const Matrix &m, std::size_t dx, std::size_t dy) {
    const auto sx = static_cast<Index>(dx), sy = static_cast<Index>(dy);
    Matrix out(sx * sy, sx * sy);
#pragma omp parallel for collapse(2) schedule(static)
    for (Index xp = 0; xp < sx; ++xp) {
        for (Index yp = 0; yp < sy; ++yp) {
            for (Index x = 0; x < sx; ++x) {
                for (Index y = 0; y < sy; ++y) {
                    out(x * sy + y, xp * sy + yp) = m(x * sx + xp, y * sy + yp);
                }
            }
        }
    }
    return out;
}

}  // namespace omp

}  // namespace qproc::kernels
