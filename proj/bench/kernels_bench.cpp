// Serial reference vs OpenMP kernels on n qubit wires (matrix side 2^n).

#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "qproc/kernels.hpp"
#include "qproc/random.hpp"

namespace {

using qproc::kernels::Matrix;

struct Input {
    std::vector<std::size_t> dims;
    std::vector<char> mask;
    std::vector<std::size_t> order;
    Matrix m;
};

Input make_input(int wires) {
    Input in;
    in.dims.assign(static_cast<std::size_t>(wires), 2);
    in.mask.assign(static_cast<std::size_t>(wires), 0);
    // trace / transpose every other wire
    for (std::size_t k = 0; k < in.mask.size(); k += 2) {
        in.mask[k] = 1;
    }
    in.order.resize(in.dims.size());
    std::iota(in.order.rbegin(), in.order.rend(), 0);
    const int side = 1 << wires;
    qproc::Rng rng(42);
    in.m.resize(side, side);
    for (int j = 0; j < side; ++j) {
        for (int i = 0; i < side; ++i) {
            in.m(i, j) = rng.complex_normal();
        }
    }
    return in;
}

template <Matrix (*F)(const Matrix &, qproc::kernels::Dims, qproc::kernels::Mask)>
void masked(benchmark::State &state) {
    const auto in = make_input(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(F(in.m, in.dims, in.mask));
    }
    state.SetBytesProcessed(state.iterations() * in.m.size() * static_cast<long>(sizeof(std::complex<double>)));
}

template <Matrix (*F)(const Matrix &, qproc::kernels::Dims, std::span<const std::size_t>)>
void permuted(benchmark::State &state) {
    const auto in = make_input(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(F(in.m, in.dims, in.order));
    }
    state.SetBytesProcessed(state.iterations() * in.m.size() * static_cast<long>(sizeof(std::complex<double>)));
}

template <Matrix (*F)(const Matrix &, const Matrix &)>
void kron(benchmark::State &state) {
    const auto a = make_input(static_cast<int>(state.range(0)) - 2).m;
    const auto b = make_input(2).m;
    for (auto _ : state) {
        benchmark::DoNotOptimize(F(a, b));
    }
}

namespace s = qproc::kernels::serial;
namespace o = qproc::kernels::omp;

}  // namespace

BENCHMARK(masked<s::partial_trace>)->Name("partial_trace/serial")->DenseRange(6, 10, 2);
BENCHMARK(masked<o::partial_trace>)->Name("partial_trace/omp")->DenseRange(6, 10, 2);
BENCHMARK(masked<s::partial_transpose>)->Name("partial_transpose/serial")->DenseRange(6, 10, 2);
BENCHMARK(masked<o::partial_transpose>)->Name("partial_transpose/omp")->DenseRange(6, 10, 2);
BENCHMARK(permuted<s::permute>)->Name("permute/serial")->DenseRange(6, 10, 2);
BENCHMARK(permuted<o::permute>)->Name("permute/omp")->DenseRange(6, 10, 2);
BENCHMARK(kron<s::kron>)->Name("kron/serial")->DenseRange(6, 10, 2);
BENCHMARK(kron<o::kron>)->Name("kron/omp")->DenseRange(6, 10, 2);

BENCHMARK_MAIN();
