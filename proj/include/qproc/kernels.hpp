#pragma once

// Index-remapping kernels over mixed-radix (leftmost-most-significant) operator indices.
//
// Two implementations with identical signatures:
//   serial::  straightforward per-element digit arithmetic; the reference used by tests.
//   omp::     precomputed offset tables and OpenMP-parallel outer loops; used by the library.
//
// `dims` lists the wire dimensions in index order. Boolean masks select wires.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qproc::kernels {

using Matrix = Eigen::MatrixXcd;
using Dims = std::span<const std::size_t>;
using Mask = std::span<const char>;

namespace serial {

Matrix kron(const Matrix &a, const Matrix &b);
/// Output axis i is input axis order[i].
Matrix permute(const Matrix &m, Dims dims, std::span<const std::size_t> order);
Matrix partial_trace(const Matrix &m, Dims dims, Mask traced);
Matrix partial_transpose(const Matrix &m, Dims dims, Mask transposed);
/// out(x*dx + x', y*dy + y') = m(x*dy + y, x'*dy + y') for m of side dx*dy.
Matrix realign(const Matrix &m, std::size_t dx, std::size_t dy);
/// Inverse of realign: out(x*dy + y, x'*dy + y') = m(x*dx + x', y*dy + y').
Matrix unrealign(const Matrix &m, std::size_t dx, std::size_t dy);

}  // namespace serial

namespace omp {

Matrix kron(const Matrix &a, const Matrix &b);
Matrix permute(const Matrix &m, Dims dims, std::span<const std::size_t> order);
Matrix partial_trace(const Matrix &m, Dims dims, Mask traced);
Matrix partial_transpose(const Matrix &m, Dims dims, Mask transposed);
Matrix realign(const Matrix &m, std::size_t dx, std::size_t dy);
Matrix unrealign(const Matrix &m, std::size_t dx, std::size_t dy);

}  // namespace omp

/// Number of OpenMP threads the omp:: kernels will use (1 when built without OpenMP).
int max_threads();

}  // namespace qproc::kernels
