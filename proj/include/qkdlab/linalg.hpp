#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qkdlab {

using cplx = std::complex<double>;

/// Tolerance for algebraic invariants (unitarity, trace, completeness).
inline constexpr double kAlgebraTol = 1e-12;

/// Dense square complex matrix, row-major. Everything here acts on one or
/// two qubits, so dimensions stay at 2 or 4.
class CMat {
public:
    explicit CMat(int dim)
        : dim_(dim), a_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
        if (dim < 1) throw std::invalid_argument("CMat: dimension must be >= 1");
    }

    static CMat identity(int dim) {
        CMat m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = cplx(1.0, 0.0);
        return m;
    }

    int dim() const { return dim_; }

    cplx& at(int r, int c) { return a_[idx(r, c)]; }
    const cplx& at(int r, int c) const { return a_[idx(r, c)]; }

    CMat operator*(const CMat& o) const {
        require_same_dim(o);
        CMat out(dim_);
        for (int i = 0; i < dim_; ++i) {
            for (int k = 0; k < dim_; ++k) {
                const cplx aik = at(i, k);
                if (aik == cplx{}) continue;
                for (int j = 0; j < dim_; ++j) out.at(i, j) += aik * o.at(k, j);
            }
        }
        return out;
    }

    CMat& operator+=(const CMat& o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }

    CMat operator+(const CMat& o) const {
        CMat r = *this;
        r += o;
        return r;
    }

    CMat scaled(cplx s) const {
        CMat r = *this;
        for (auto& v : r.a_) v *= s;
        return r;
    }

    CMat adjoint() const {
        CMat r(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) r.at(i, j) = std::conj(at(j, i));
        return r;
    }

    cplx trace() const {
        cplx t{};
        for (int i = 0; i < dim_; ++i) t += at(i, i);
        return t;
    }

    bool finite() const {
        for (const auto& v : a_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

private:
    std::size_t idx(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(dim_) +
               static_cast<std::size_t>(c);
    }
    void require_same_dim(const CMat& o) const {
        if (o.dim_ != dim_) throw std::invalid_argument("CMat: dimension mismatch");
    }

    int dim_;
    std::vector<cplx> a_;
};

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            for (int k = 0; k < b.dim(); ++k)
                for (int l = 0; l < b.dim(); ++l)
                    out.at(i * b.dim() + k, j * b.dim() + l) = a.at(i, j) * b.at(k, l);
    return out;
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a.at(i, j) - b.at(i, j)));
    return m;
}

inline bool is_unitary(const CMat& u, double tol = kAlgebraTol) {
    return max_abs_diff(u.adjoint() * u, CMat::identity(u.dim())) < tol;
}

inline double hermiticity_deviation(const CMat& a) {
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            m = std::max(m, std::abs(a.at(i, j) - std::conj(a.at(j, i))));
    return m;
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi
/// rotations. Plenty for the 2x2/4x4 matrices this library produces.
inline std::vector<double> hermitian_eigenvalues(CMat a) {
    const int n = a.dim();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a.at(p, q)));
        if (off < 1e-15) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a.at(p, q);
                const double g = std::abs(apq);
                if (g < 1e-18) continue;
                const cplx phase = apq / g;
                const double app = a.at(p, p).real();
                const double aqq = a.at(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * g, app - aqq);
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                // A <- R^dagger A R with the plane rotation chosen to zero A_pq.
                for (int k = 0; k < n; ++k) {
                    const cplx akp = a.at(k, p);
                    const cplx akq = a.at(k, q);
                    a.at(k, p) = c * akp + s * std::conj(phase) * akq;
                    a.at(k, q) = -s * phase * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx apk = a.at(p, k);
                    const cplx aqk = a.at(q, k);
                    a.at(p, k) = c * apk + s * phase * aqk;
                    a.at(q, k) = -s * std::conj(phase) * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a.at(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace qkdlab
