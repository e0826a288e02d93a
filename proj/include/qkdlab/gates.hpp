#pragma once

#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qkdlab/linalg.hpp"

namespace qkdlab {

inline constexpr double kPi = std::numbers::pi;

enum class Gate { I, X, Y, Z, H, P, RX, RY, RZ, CNOT };

inline bool gate_takes_angle(Gate g) {
    return g == Gate::P || g == Gate::RX || g == Gate::RY || g == Gate::RZ;
}

inline Gate gate_from_name(std::string_view name) {
    if (name == "I") return Gate::I;
    if (name == "X") return Gate::X;
    if (name == "Y") return Gate::Y;
    if (name == "Z") return Gate::Z;
    if (name == "H") return Gate::H;
    if (name == "P") return Gate::P;
    if (name == "RX") return Gate::RX;
    if (name == "RY") return Gate::RY;
    if (name == "RZ") return Gate::RZ;
    if (name == "CNOT") return Gate::CNOT;
    throw std::invalid_argument("unknown gate name: " + std::string(name));
}

/// Unitary for a named gate. The angle is required exactly for the
/// parameterized set {P, RX, RY, RZ}. Qubit 0 is the most significant bit of
/// the basis index; CNOT has qubit 0 as control and qubit 1 as target.
inline CMat make_gate(Gate g, std::optional<double> angle = std::nullopt) {
    if (gate_takes_angle(g) && !angle)
        throw std::invalid_argument("make_gate: this gate requires an angle");
    if (!gate_takes_angle(g) && angle)
        throw std::invalid_argument("make_gate: this gate takes no angle");

    const cplx i1(0.0, 1.0);
    switch (g) {
        case Gate::I:
            return CMat::identity(2);
        case Gate::X: {
            CMat m(2);
            m.at(0, 1) = 1.0;
            m.at(1, 0) = 1.0;
            return m;
        }
        case Gate::Y: {
            CMat m(2);
            m.at(0, 1) = -i1;
            m.at(1, 0) = i1;
            return m;
        }
        case Gate::Z: {
            CMat m(2);
            m.at(0, 0) = 1.0;
            m.at(1, 1) = -1.0;
            return m;
        }
        case Gate::H: {
            const double s = 1.0 / std::sqrt(2.0);
            CMat m(2);
            m.at(0, 0) = s;
            m.at(0, 1) = s;
            m.at(1, 0) = s;
            m.at(1, 1) = -s;
            return m;
        }
        case Gate::P: {
            CMat m(2);
            m.at(0, 0) = 1.0;
            m.at(1, 1) = std::exp(i1 * (*angle));
            return m;
        }
        case Gate::RX: {
            const double c = std::cos(*angle / 2.0);
            const double s = std::sin(*angle / 2.0);
            CMat m(2);
            m.at(0, 0) = c;
            m.at(0, 1) = -i1 * s;
            m.at(1, 0) = -i1 * s;
            m.at(1, 1) = c;
            return m;
        }
        case Gate::RY: {
            const double c = std::cos(*angle / 2.0);
            const double s = std::sin(*angle / 2.0);
            CMat m(2);
            m.at(0, 0) = c;
            m.at(0, 1) = -s;
            m.at(1, 0) = s;
            m.at(1, 1) = c;
            return m;
        }
        case Gate::RZ: {
            CMat m(2);
            m.at(0, 0) = std::exp(-i1 * (*angle / 2.0));
            m.at(1, 1) = std::exp(i1 * (*angle / 2.0));
            return m;
        }
        case Gate::CNOT: {
            CMat m(4);
            m.at(0, 0) = 1.0;
            m.at(1, 1) = 1.0;
            m.at(2, 3) = 1.0;
            m.at(3, 2) = 1.0;
            return m;
        }
    }
    throw std::logic_error("make_gate: unreachable");
}

inline CMat make_gate(std::string_view name, std::optional<double> angle = std::nullopt) {
    return make_gate(gate_from_name(name), angle);
}

}  // namespace qkdlab
