#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pdnr/fock.hpp"
#include "pdnr/model.hpp"

namespace pdnr {

class positivity_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class truncation_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// d(rho)/dt = -i[H(t), rho] + sum_i (L_i rho L_i^dag - 1/2 {L_i^dag L_i, rho})
// with L_1 = sqrt((N+1) gamma) a and L_2 = sqrt(N gamma) a^dag.
// All operators are bands or diagonals in the Fock basis, so every term is a
// shifted/scaled copy of rho: O(D^2) per evaluation, no matrix products.
inline Density lindblad_rhs(const Density& rho, double t, const ModelParams& p) {
    const int d = static_cast<int>(rho.rows());
    if (rho.cols() != d) throw std::invalid_argument("lindblad_rhs: rho must be square");
    if (d != p.dim) throw std::invalid_argument("lindblad_rhs: rho/params dimension mismatch");

    const double f = envelope_at(t, p);
    const Complex om = p.omega();
    const Complex fo = f * om;
    const Complex foc = f * std::conj(om);
    const double g_down = p.gamma * (p.n_bath + 1.0);
    const double g_up = p.gamma * p.n_bath;

    Density out = Density::Zero(d, d);

    // -i [diag(e), rho], e_n = delta*n + chi*n^2
    for (int m = 0; m < d; ++m) {
        const double em = p.delta * m + p.chi * static_cast<double>(m) * m;
        for (int n = 0; n < d; ++n) {
            const double en = p.delta * n + p.chi * static_cast<double>(n) * n;
            out(m, n) = -kI * (em - en) * rho(m, n);
        }
    }

    // -i f [Omega a^dag^2 + Omega* a^2, rho]
    auto s2 = [](int n) { return std::sqrt(static_cast<double>(n + 1) * (n + 2)); };
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            Complex c{0.0, 0.0};
            if (m >= 2) c += fo * s2(m - 2) * rho(m - 2, n);       // a^dag^2 rho
            if (n + 2 < d) c -= fo * s2(n) * rho(m, n + 2);        // rho a^dag^2
            if (m + 2 < d) c += foc * s2(m) * rho(m + 2, n);       // a^2 rho
            if (n >= 2) c -= foc * s2(n - 2) * rho(m, n - 2);      // rho a^2
            out(m, n) += -kI * c;
        }
    }

    // decay channel: g_down (a rho a^dag - 1/2 {n, rho})
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            Complex c{0.0, 0.0};
            if (m + 1 < d && n + 1 < d)
                c += std::sqrt(static_cast<double>(m + 1) * (n + 1)) * rho(m + 1, n + 1);
            c -= 0.5 * static_cast<double>(m + n) * rho(m, n);
            out(m, n) += g_down * c;
        }
    }

    // thermal channel: g_up (a^dag rho a - 1/2 {a a^dag, rho}); skipped
    // identically when N = 0.
    if (g_up != 0.0) {
        for (int m = 0; m < d; ++m) {
            for (int n = 0; n < d; ++n) {
                Complex c{0.0, 0.0};
                if (m >= 1 && n >= 1)
                    c += std::sqrt(static_cast<double>(m) * n) * rho(m - 1, n - 1);
                c -= 0.5 * static_cast<double>((m + 1) + (n + 1)) * rho(m, n);
                out(m, n) += g_up * c;
            }
        }
    }
    return out;
}

// P(n) = Re(rho_nn)
inline Eigen::VectorXd number_distribution(const Density& rho) {
    return rho.diagonal().real();
}

inline double mean_excitation(const Density& rho) {
    double s = 0.0;
    for (int n = 0; n < rho.rows(); ++n) s += n * rho(n, n).real();
    return s;
}

struct EvolveOptions {
    double step = 1e-3;
    bool store_states = true;
    double positivity_floor = -1e-6;   // abort threshold on min eigenvalue
    double top_level_budget = 1e-6;    // abort threshold on top-5-level mass
    int guard_levels = 5;
    bool check_positivity = true;
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<Density> states;   // empty when store_states = false
    std::vector<double> mean_n;
    double step = 0.0;
    std::string method = "rk4-fixed";
};

// Classical fixed-step RK4 with Hermitian symmetrization each step.
// Positivity and truncation are monitored at sample times, never projected.
// Sample times are snapped to the step grid (t0 + k*step).
inline EvolutionResult evolve_master(const Density& rho0, const std::vector<double>& t_grid,
                                     const ModelParams& p, const EvolveOptions& opts = {}) {
    if (opts.step <= 0.0) throw std::invalid_argument("evolve_master: step must be positive");
    if (t_grid.empty()) throw std::invalid_argument("evolve_master: empty sample grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1])
            throw std::invalid_argument("evolve_master: sample times must increase");

    const double t0 = t_grid.front();
    const double dt = opts.step;
    EvolutionResult res;
    res.step = dt;

    std::vector<long> sample_steps;
    sample_steps.reserve(t_grid.size());
    for (double t : t_grid) sample_steps.push_back(std::lround((t - t0) / dt));

    Density rho = rho0;
    long k = 0;
    std::size_t next = 0;

    auto record = [&](long step_index) {
        const double t = t0 + static_cast<double>(step_index) * dt;
        res.times.push_back(t);
        res.mean_n.push_back(mean_excitation(rho));
        if (opts.store_states) res.states.push_back(rho);
        if (trace_deviation(rho) > 1e-9)
            throw std::runtime_error("evolve_master: trace drift exceeds 1e-9 at t=" +
                                     std::to_string(t));
        if (opts.check_positivity) {
            const double lam = min_eigenvalue(rho);
            if (lam < opts.positivity_floor)
                throw positivity_error(
                    "evolve_master: eigenvalue " + std::to_string(lam) + " below floor at t=" +
                    std::to_string(t) + "; reduce step or raise dim");
        }
        double top = 0.0;
        for (int n = std::max(0, p.dim - opts.guard_levels); n < p.dim; ++n)
            top += rho(n, n).real();
        if (top > opts.top_level_budget)
            throw truncation_error("evolve_master: top-level population " + std::to_string(top) +
                                   " at t=" + std::to_string(t) + "; raise dim");
    };

    while (true) {
        while (next < sample_steps.size() && sample_steps[next] == k) {
            record(k);
            ++next;
        }
        if (next >= sample_steps.size()) break;
        const double t = t0 + static_cast<double>(k) * dt;
        const Density k1 = lindblad_rhs(rho, t, p);
        const Density k2 = lindblad_rhs(rho + (0.5 * dt) * k1, t + 0.5 * dt, p);
        const Density k3 = lindblad_rhs(rho + (0.5 * dt) * k2, t + 0.5 * dt, p);
        const Density k4 = lindblad_rhs(rho + dt * k3, t + dt, p);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint().eval());
        ++k;
    }
    return res;
}

}  // namespace pdnr
