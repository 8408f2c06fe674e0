#pragma once

// Named example processes and the on-disk process format.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "qproc/processes.hpp"

namespace qproc {

/// Three-time classical-memory process: the system output at time 1 is swapped into the
/// environment, dephased, and used at time 2 to control a NOT on the system. The initial
/// system state is maximally mixed unless given.
ProcessTensor fig3_process();
ProcessTensor fig3_process(const LabeledOperator &rho1);

/// Two-time separable process (1/2)(|000><000| + |101><101| + |+1+><+1+| + |-1-><-1-|) on
/// (2i, 1o, 1i), assembled as a four-term separable sum.
ProcessTensor guerin_process();

/// Inputs share `state` (on N^i..1^i, in that order), outputs are discarded: state (x) 1.
ProcessTensor common_cause(const Matrix &state, int n_times, int d);
/// Common cause with the N-qubit GHZ state.
ProcessTensor ghz_common_cause(int n_times);

/// Identity channels between times and |0><0| at 1^i.
ProcessTensor trivial_identity(int n_times, int d);

/// Seed-deterministic random process of the given class (M, MM, CM, SEP, QM).
ProcessTensor random_process(std::string_view cls, int n_times, int d, std::uint64_t seed);

struct ProcessFile {
    int format_version = 1;
    LabeledOperator op;
    std::map<std::string, std::string> metadata;
};

/// JSON text, one matrix row per line, doubles in shortest round-trip form.
std::string serialize(const ProcessFile &file);
/// Throws ParseError (with byte offset when the JSON itself is malformed).
ProcessFile deserialize(std::string_view text);

/// Largest matrix side accepted by deserialize.
inline constexpr std::size_t kMaxMatrixSide = 512;

}  // namespace qproc
