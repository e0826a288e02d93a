#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qkdlab/density.hpp"
#include "qkdlab/gates.hpp"

namespace qkdlab {

/// Ansatz shape. Each layer gives every qubit an Rz-Ry-Rz Euler triple
/// (universal for a single qubit up to global phase); on two qubits a CNOT
/// entangler closes each layer.
struct AnsatzSpec {
    int qubits = 1;
    int layers = 1;

    int param_count() const { return 3 * qubits * layers; }
};

inline double canonical_angle(double t) {
    t = std::fmod(t, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    if (t >= 2.0 * kPi) t = 0.0;
    return t;
}

/// Trainable angles of the parameterized circuit, stored in [0, 2pi).
struct PqcParams {
    std::vector<double> thetas;
    AnsatzSpec spec;

    static PqcParams zeros(AnsatzSpec s) {
        return PqcParams{std::vector<double>(static_cast<std::size_t>(s.param_count()), 0.0), s};
    }

    static PqcParams from(std::vector<double> t, AnsatzSpec s) {
        if (static_cast<int>(t.size()) != s.param_count())
            throw std::invalid_argument("PqcParams: parameter count mismatch");
        if (s.qubits < 1 || s.qubits > 2 || s.layers < 1)
            throw std::invalid_argument("PqcParams: bad ansatz spec");
        for (double& v : t) v = canonical_angle(v);
        return PqcParams{std::move(t), s};
    }
};

/// Full unitary of the ansatz. Within a layer the first angle's gate is
/// applied first.
inline CMat pqc_unitary(const PqcParams& p) {
    const int dim = 1 << p.spec.qubits;
    CMat u = CMat::identity(dim);
    std::size_t idx = 0;
    for (int layer = 0; layer < p.spec.layers; ++layer) {
        for (int q = 0; q < p.spec.qubits; ++q) {
            const double a = p.thetas[idx++];
            const double b = p.thetas[idx++];
            const double c = p.thetas[idx++];
            CMat rot = make_gate(Gate::RZ, c) * make_gate(Gate::RY, b) * make_gate(Gate::RZ, a);
            u = embed_operator(rot, {q}, p.spec.qubits) * u;
        }
        if (p.spec.qubits == 2) u = make_gate(Gate::CNOT) * u;
    }
    return u;
}

inline DensityMatrix apply_pqc(const DensityMatrix& state, const PqcParams& p) {
    if (state.qubits() != p.spec.qubits)
        throw std::invalid_argument("apply_pqc: qubit count mismatch");
    const CMat u = pqc_unitary(p);
    return DensityMatrix(u * state.matrix() * u.adjoint());
}

}  // namespace qkdlab
