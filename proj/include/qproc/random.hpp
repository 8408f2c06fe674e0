#pragma once

// Seeded random instances. Only the 64-bit Mersenne Twister is taken from <random>; the
// distributions are written out so that draws are identical across standard libraries.

#include <cstdint>
#include <random>

#include "qproc/choi.hpp"
#include "qproc/processes.hpp"

namespace qproc {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller.
    double normal();
    /// Real and imaginary parts independent N(0, 1/2).
    cdouble complex_normal();
    /// Uniform integer in [0, n).
    int index(int n);

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Haar-random unitary (QR of a Ginibre matrix with the phases of R's diagonal removed).
Matrix random_unitary(int d, Rng &rng);

/// Uniformly random unit vector.
Eigen::VectorXcd random_pure_vector(int d, Rng &rng);

/// Random density operator of the given rank (full rank when rank <= 0), Hilbert-Schmidt-like.
LabeledOperator random_state(const LabelList &labels, Rng &rng, int rank = 0);

/// CPTP map from `in` to `out` with `kraus` Kraus operators, via a random Stinespring isometry.
ChoiChannel random_channel(const SpaceLabel &in, const SpaceLabel &out, Rng &rng, int kraus = 2);

/// Random POVM with `outcomes` elements on `label` (real in Choi form after normalisation).
Povm random_povm(const SpaceLabel &label, int outcomes, Rng &rng);

/// Measure-and-prepare channel in -> out with random POVM and random prepared states.
MeasurePrepare random_measure_prepare(const SpaceLabel &in, const SpaceLabel &out, int outcomes, Rng &rng);

/// Memoryless process with random channels and initial state on d-dimensional wires.
ProcessTensor random_memoryless(int n_times, int d, Rng &rng);

/// Random system-environment unitary steps for an N-time dilation (system d, environment de).
std::vector<DilationStep> random_steps(int n_times, int d, int de, Rng &rng);

}  // namespace qproc
