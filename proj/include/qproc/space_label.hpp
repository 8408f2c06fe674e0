#pragma once

#include <compare>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace qproc {

enum class Port : int { input = 0, output = 1 };
enum class Role : int { system = 0, environment = 1, ancilla = 2 };

/// A named Hilbert-space wire. Two labels are the same wire iff every field matches.
struct SpaceLabel {
    int time = 1;
    Port port = Port::input;
    Role role = Role::system;
    int dim = 1;

    friend auto operator<=>(const SpaceLabel &, const SpaceLabel &) = default;
};

using LabelList = std::vector<SpaceLabel>;

inline SpaceLabel sys_in(int time, int dim) {
    return {time, Port::input, Role::system, dim};
}
inline SpaceLabel sys_out(int time, int dim) {
    return {time, Port::output, Role::system, dim};
}
inline SpaceLabel env_in(int time, int dim) {
    return {time, Port::input, Role::environment, dim};
}
inline SpaceLabel env_out(int time, int dim) {
    return {time, Port::output, Role::environment, dim};
}

/// Short wire name, e.g. "2i", "1o", "E3i", "A1i".
std::string to_string(const SpaceLabel &label);
std::string to_string(const LabelList &labels);

std::ostream &operator<<(std::ostream &out, const SpaceLabel &label);

/// Product of the label dimensions (1 for an empty list).
std::size_t total_dim(const LabelList &labels);

}  // namespace qproc
