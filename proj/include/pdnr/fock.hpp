#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace pdnr {

using Complex = std::complex<double>;
// Dense operators/states over the truncated Fock basis {|0>,...,|D-1>}.
// hbar = 1, gamma = 1; all rates in units of gamma, time in gamma^-1.
using Operator = Eigen::MatrixXcd;
using State = Eigen::VectorXcd;
using Density = Eigen::MatrixXcd;

constexpr Complex kI{0.0, 1.0};

inline void require_dim(int dim, int min_dim, const char* what) {
    if (dim < min_dim)
        throw std::invalid_argument(std::string(what) + ": dimension must be >= " +
                                    std::to_string(min_dim) + ", got " + std::to_string(dim));
}

// a: entry (n-1, n) = sqrt(n)
inline Operator annihilation(int dim) {
    require_dim(dim, 2, "annihilation");
    Operator a = Operator::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Operator creation(int dim) { return annihilation(dim).adjoint(); }

inline Operator number_op(int dim) {
    require_dim(dim, 1, "number_op");
    Operator n = Operator::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

// (a^dag a)^2: diagonal n^2
inline Operator kerr_op(int dim) {
    require_dim(dim, 1, "kerr_op");
    Operator m = Operator::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) m(k, k) = static_cast<double>(k) * static_cast<double>(k);
    return m;
}

// exp(i pi a^dag a): diagonal (-1)^n
inline Operator parity_op(int dim) {
    require_dim(dim, 1, "parity_op");
    Operator p = Operator::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return p;
}

// exp(alpha a^dag - alpha* a), scaling-and-squaring Pade behind Eigen.
// Unitary on the truncated space; leakage versus the untruncated operator is
// quantified by the coherent-state tests.
inline Operator displacement(Complex alpha, int dim) {
    require_dim(dim, 2, "displacement");
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
        throw std::invalid_argument("displacement: alpha must be finite");
    const Operator a = annihilation(dim);
    Operator gen = alpha * a.adjoint() - std::conj(alpha) * a;
    return gen.exp();
}

inline State vacuum_state(int dim) {
    require_dim(dim, 1, "vacuum_state");
    State v = State::Zero(dim);
    v(0) = 1.0;
    return v;
}

inline State fock_state(int dim, int n) {
    require_dim(dim, 1, "fock_state");
    if (n < 0 || n >= dim) throw std::invalid_argument("fock_state: level out of range");
    State v = State::Zero(dim);
    v(n) = 1.0;
    return v;
}

inline Density pure_density(const State& psi) { return psi * psi.adjoint(); }

inline Complex expectation(const Operator& op, const State& psi) {
    if (op.rows() != psi.size())
        throw std::invalid_argument("expectation: operator/state dimension mismatch");
    return (psi.adjoint() * op * psi)(0, 0);
}

inline Complex expectation(const Operator& op, const Density& rho) {
    if (op.rows() != rho.rows())
        throw std::invalid_argument("expectation: operator/density dimension mismatch");
    return (op * rho).trace();
}

inline double hermiticity_defect(const Operator& m) {
    return (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
}

inline double trace_deviation(const Density& rho) { return std::abs(rho.trace() - Complex(1.0)); }

inline double min_eigenvalue(const Density& rho) {
    Eigen::SelfAdjointEigenSolver<Density> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// 1/2 * trace norm of (rho1 - rho2)
inline double trace_distance(const Density& rho1, const Density& rho2) {
    Eigen::SelfAdjointEigenSolver<Density> es(rho1 - rho2, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace pdnr
