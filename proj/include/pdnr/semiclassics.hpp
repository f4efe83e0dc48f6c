#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "pdnr/model.hpp"

namespace pdnr {

// Mean-field flow of the dimensionless amplitude:
//   d(alpha)/dt = -i[delta + chi + 2|alpha|^2 chi] alpha - i f(t) Omega alpha* - gamma alpha
// The drive sign is the one consistent with the Hamiltonian's mean-field
// limit; it makes the locked phases of the fixed points satisfy
// sin(Phi - 2 phi) = J^{-1/2} with J = |Omega|^2/gamma^2.
inline Complex semiclassical_rhs(Complex alpha, double t, const ModelParams& p) {
    const double n = std::norm(alpha);
    return -kI * (p.delta + p.chi + 2.0 * n * p.chi) * alpha -
           kI * envelope_at(t, p) * p.omega() * std::conj(alpha) - p.gamma * alpha;
}

// Fixed-step RK4 trace of alpha at the requested sample times.
inline std::vector<Complex> evolve_classical(Complex alpha0, const std::vector<double>& t_grid,
                                             const ModelParams& p, double step) {
    if (step <= 0.0) throw std::invalid_argument("evolve_classical: step must be positive");
    if (t_grid.empty()) throw std::invalid_argument("evolve_classical: empty sample grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1])
            throw std::invalid_argument("evolve_classical: sample times must increase");

    const double t0 = t_grid.front();
    std::vector<long> sample_steps;
    sample_steps.reserve(t_grid.size());
    for (double t : t_grid) sample_steps.push_back(std::lround((t - t0) / step));

    std::vector<Complex> out;
    out.reserve(t_grid.size());
    Complex alpha = alpha0;
    long k = 0;
    std::size_t next = 0;
    while (true) {
        while (next < sample_steps.size() && sample_steps[next] == k) {
            out.push_back(alpha);
            ++next;
        }
        if (next >= sample_steps.size()) break;
        const double t = t0 + static_cast<double>(k) * step;
        const Complex k1 = semiclassical_rhs(alpha, t, p);
        const Complex k2 = semiclassical_rhs(alpha + 0.5 * step * k1, t + 0.5 * step, p);
        const Complex k3 = semiclassical_rhs(alpha + 0.5 * step * k2, t + 0.5 * step, p);
        const Complex k4 = semiclassical_rhs(alpha + step * k3, t + step, p);
        alpha += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::abs(alpha) > 1e6)
            throw std::runtime_error("evolve_classical: amplitude diverged (|alpha| > 1e6) at t=" +
                                     std::to_string(t));
        ++k;
    }
    return out;
}

// Instability threshold of the origin for cw drive: J_th = 1 + (delta/gamma)^2
// with J = |Omega|^2/gamma^2.
inline double threshold_J(const ModelParams& p) {
    if (p.gamma <= 0.0) throw std::invalid_argument("threshold_J: gamma must be positive");
    const double dg = p.delta / p.gamma;
    return 1.0 + dg * dg;
}

inline double wrap_phase(double phi) {
    phi = std::fmod(phi, 2.0 * M_PI);
    if (phi <= -M_PI) phi += 2.0 * M_PI;
    if (phi > M_PI) phi -= 2.0 * M_PI;
    return phi;
}

struct SteadyStateSolution {
    double n = 0.0;           // ODE-verified intensity (photon-number units)
    double phases[2] = {0.0, 0.0};  // locked pair, phases[1] = phases[0] + pi (wrapped)
    double J = 0.0;
    int branch = 0;           // sign of the effective-detuning branch
    double residuals[2] = {0.0, 0.0};
    double paper_formula_n = 0.0;   // closed-form value, reported for comparison
    bool matches_closed_form = false;
};

struct SteadyStateResult {
    bool below_threshold = false;
    bool inconsistent = false;  // candidates existed but none residual-verified
    std::vector<SteadyStateSolution> solutions;
};

// Above-threshold fixed points of the cw flow. Candidates come from both
// sign branches of the effective-detuning condition
//   delta + chi + 2 n chi = s * gamma * sqrt(J-1),   s = +-1,
// are filtered to n >= 0, and are verified by substitution into
// semiclassical_rhs before being returned. Each solution carries both locked
// phases; counting verified solutions is the bistability report.
inline SteadyStateResult steady_states(const ModelParams& p) {
    if (p.pulse || p.custom_envelope)
        throw std::invalid_argument("steady_states: cw drive required");
    if (p.chi == 0.0) throw std::invalid_argument("steady_states: chi must be nonzero");
    SteadyStateResult res;
    const double J = p.intensity;
    if (J <= 1.0) {
        res.below_threshold = true;
        return res;
    }
    const double root = p.gamma * std::sqrt(J - 1.0);
    bool had_candidate = false;
    for (int s : {+1, -1}) {
        const double eff = static_cast<double>(s) * root;  // delta + chi + 2 n chi
        const double n = (eff - p.delta - p.chi) / (2.0 * p.chi);
        if (!(n >= 0.0)) continue;
        had_candidate = true;
        // Phase from the fixed-point condition: Phi - 2 phi = atan2(gamma, -eff).
        const double psi_angle = std::atan2(p.gamma, -eff);
        SteadyStateSolution sol;
        sol.n = n;
        sol.J = J;
        sol.branch = s;
        sol.phases[0] = wrap_phase(0.5 * (p.phase - psi_angle));
        sol.phases[1] = wrap_phase(sol.phases[0] + M_PI);
        const double r = std::sqrt(n);
        bool ok = true;
        for (int i = 0; i < 2; ++i) {
            const Complex alpha = r * std::exp(kI * sol.phases[i]);
            sol.residuals[i] = std::abs(semiclassical_rhs(alpha, 0.0, p));
            if (!(sol.residuals[i] <= 1e-8)) ok = false;
        }
        sol.paper_formula_n =
            0.5 * (p.gamma / p.chi) * (p.delta / p.gamma + std::sqrt(J - 1.0));
        sol.matches_closed_form =
            std::abs(sol.n - sol.paper_formula_n) <= 1e-6 * std::max(1.0, std::abs(sol.paper_formula_n));
        if (ok) res.solutions.push_back(sol);
    }
    if (had_candidate && res.solutions.empty()) res.inconsistent = true;
    return res;
}

// Classical amplitude sampled once per pulse period after the first pulse:
// t_k = t0 + k*tau, k = 1..n_periods. Integration step = tau/2048.
inline std::vector<Complex> stroboscopic_map(Complex alpha0, const ModelParams& p,
                                             int n_periods) {
    if (!p.pulse) throw std::invalid_argument("stroboscopic_map: pulsed drive required");
    if (n_periods < 1) throw std::invalid_argument("stroboscopic_map: n_periods must be >= 1");
    const double tau = p.pulse->separation;
    std::vector<double> t_grid;
    t_grid.reserve(static_cast<std::size_t>(n_periods) + 1);
    t_grid.push_back(p.pulse->t0);
    for (int k = 1; k <= n_periods; ++k)
        t_grid.push_back(p.pulse->t0 + static_cast<double>(k) * tau);
    auto trace = evolve_classical(alpha0, t_grid, p, tau / 2048.0);
    trace.erase(trace.begin());  // drop the t0 sample
    return trace;
}

}  // namespace pdnr
