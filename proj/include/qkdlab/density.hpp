#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qkdlab/linalg.hpp"
#include "qkdlab/shots.hpp"

namespace qkdlab {

/// Quantum state of one or two qubits as a density matrix. Pure inputs are
/// embedded as rank-1 matrices so unitary and noisy evolution share one code
/// path.
class DensityMatrix {
public:
    explicit DensityMatrix(CMat rho) : rho_(std::move(rho)) {
        if (rho_.dim() != 2 && rho_.dim() != 4)
            throw std::invalid_argument("DensityMatrix: dimension must be 2 or 4");
        if (!rho_.finite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
    }

    static DensityMatrix basis_state(int qubits, int index) {
        if (qubits < 1 || qubits > 2)
            throw std::invalid_argument("basis_state: qubit count must be 1 or 2");
        const int dim = 1 << qubits;
        if (index < 0 || index >= dim) throw std::invalid_argument("basis_state: index out of range");
        CMat rho(dim);
        rho.at(index, index) = 1.0;
        return DensityMatrix(std::move(rho));
    }

    static DensityMatrix pure(const std::vector<cplx>& amplitudes) {
        const int dim = static_cast<int>(amplitudes.size());
        if (dim != 2 && dim != 4) throw std::invalid_argument("pure: dimension must be 2 or 4");
        double norm = 0.0;
        for (const cplx& a : amplitudes) norm += std::norm(a);
        if (norm < 1e-300) throw std::invalid_argument("pure: zero state");
        CMat rho(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                rho.at(i, j) = amplitudes[static_cast<std::size_t>(i)] *
                               std::conj(amplitudes[static_cast<std::size_t>(j)]) / norm;
        return DensityMatrix(std::move(rho));
    }

    int dim() const { return rho_.dim(); }
    int qubits() const { return rho_.dim() == 2 ? 1 : 2; }
    const CMat& matrix() const { return rho_; }

private:
    CMat rho_;
};

/// Expands an operator acting on `targets` to the full register. Qubit 0 is
/// the most significant bit; the first target maps to the operator's most
/// significant index bit.
inline CMat embed_operator(const CMat& op, const std::vector<int>& targets, int qubits) {
    const int k = static_cast<int>(targets.size());
    if ((1 << k) != op.dim())
        throw std::invalid_argument("embed_operator: operator dimension mismatch");
    for (int t : targets)
        if (t < 0 || t >= qubits) throw std::invalid_argument("embed_operator: target out of range");
    for (std::size_t a = 0; a < targets.size(); ++a)
        for (std::size_t b = a + 1; b < targets.size(); ++b)
            if (targets[a] == targets[b])
                throw std::invalid_argument("embed_operator: duplicate target");

    const int dim = 1 << qubits;
    auto bit_of = [qubits](int index, int qubit) { return (index >> (qubits - 1 - qubit)) & 1; };

    CMat full(dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            bool rest_equal = true;
            for (int q = 0; q < qubits && rest_equal; ++q) {
                bool is_target = false;
                for (int t : targets) is_target = is_target || (t == q);
                if (!is_target && bit_of(i, q) != bit_of(j, q)) rest_equal = false;
            }
            if (!rest_equal) continue;
            int it = 0;
            int jt = 0;
            for (int t = 0; t < k; ++t) {
                it = (it << 1) | bit_of(i, targets[static_cast<std::size_t>(t)]);
                jt = (jt << 1) | bit_of(j, targets[static_cast<std::size_t>(t)]);
            }
            full.at(i, j) = op.at(it, jt);
        }
    }
    return full;
}

/// rho' = U rho U^dagger with U acting on the given qubits.
inline DensityMatrix apply_gate(const DensityMatrix& state, const CMat& gate,
                                const std::vector<int>& targets) {
    const CMat u = embed_operator(gate, targets, state.qubits());
    return DensityMatrix(u * state.matrix() * u.adjoint());
}

/// Computational-basis outcome probabilities: the diagonal of rho.
inline MeasurementDistribution measure_distribution(const DensityMatrix& state) {
    MeasurementDistribution dist;
    dist.probabilities.resize(static_cast<std::size_t>(state.dim()));
    for (int i = 0; i < state.dim(); ++i) {
        double p = state.matrix().at(i, i).real();
        if (p < 0.0) p = 0.0;  // clip float dust
        dist.probabilities[static_cast<std::size_t>(i)] = p;
    }
    return dist;
}

struct DensityCheck {
    double hermiticity_dev = 0.0;
    double trace_dev = 0.0;
    double min_eigenvalue = 0.0;

    bool ok(double tol = kAlgebraTol) const {
        return hermiticity_dev < tol && trace_dev < tol && min_eigenvalue > -tol;
    }
};

inline DensityCheck check_density(const DensityMatrix& state) {
    DensityCheck c;
    c.hermiticity_dev = hermiticity_deviation(state.matrix());
    c.trace_dev = std::abs(state.matrix().trace() - cplx(1.0, 0.0));
    c.min_eigenvalue = hermitian_eigenvalues(state.matrix()).front();
    return c;
}

}  // namespace qkdlab
