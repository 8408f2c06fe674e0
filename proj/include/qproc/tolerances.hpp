#pragma once

namespace qproc {

// Numerical thresholds shared by every module. Matrix tolerances are relative:
// hermiticity against ||a||_F, PSD and spectral cutoff against lambda_max.
struct Tolerances {
    double hermiticity = 1e-9;
    double psd = 1e-9;
    double spectral_cutoff = 1e-10;
    double unitarity = 1e-9;
    // Absolute trace-norm residual allowed in causality / non-signalling / CPTP checks.
    double residual = 1e-9;
    // Absolute trace-norm distance used by the memoryless test.
    double memoryless = 1e-8;
};

// Process-wide defaults. Values are copied at each call site; never mutated by the library.
inline constexpr Tolerances kDefaultTolerances{};

}  // namespace qproc
