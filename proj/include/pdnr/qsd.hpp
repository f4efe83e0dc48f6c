#pragma once

#include <cmath>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdnr/fock.hpp"
#include "pdnr/model.hpp"
#include "pdnr/parallel.hpp"
#include "pdnr/rng.hpp"

namespace pdnr {

// O(D) ladder applications; the Hamiltonian couples n to n and n+-2 only.
namespace detail {

inline void apply_annihilation(const State& psi, State& out) {
    const int d = static_cast<int>(psi.size());
    for (int n = 0; n < d - 1; ++n) out(n) = std::sqrt(static_cast<double>(n + 1)) * psi(n + 1);
    out(d - 1) = 0.0;
}

inline void apply_creation(const State& psi, State& out) {
    const int d = static_cast<int>(psi.size());
    out(0) = 0.0;
    for (int n = 1; n < d; ++n) out(n) = std::sqrt(static_cast<double>(n)) * psi(n - 1);
}

inline void apply_hamiltonian(const State& psi, double t, const ModelParams& p, State& out) {
    const int d = static_cast<int>(psi.size());
    const double f = envelope_at(t, p);
    const Complex fo = f * p.omega();
    const Complex foc = std::conj(fo);
    for (int n = 0; n < d; ++n) {
        Complex v = (p.delta * n + p.chi * static_cast<double>(n) * n) * psi(n);
        if (n >= 2) v += fo * std::sqrt(static_cast<double>(n) * (n - 1)) * psi(n - 2);
        if (n + 2 < d) v += foc * std::sqrt(static_cast<double>(n + 1) * (n + 2)) * psi(n + 2);
        out(n) = v;
    }
}

// Deterministic part of the quantum-state-diffusion flow:
//   -iH|psi> + sum_i (<L_i^dag> L_i - 1/2 L_i^dag L_i - 1/2 <L_i^dag><L_i>)|psi>
// Expectations are taken in the argument state.
inline void qsd_drift(const State& psi, double t, const ModelParams& p, State& out, State& scratch) {
    const int d = static_cast<int>(psi.size());
    apply_hamiltonian(psi, t, p, out);
    out *= -kI;

    const double c1sq = p.gamma * (p.n_bath + 1.0);
    apply_annihilation(psi, scratch);
    const Complex exp_a = psi.dot(scratch);  // <a>
    for (int n = 0; n < d; ++n)
        out(n) += c1sq * (std::conj(exp_a) * scratch(n) -
                          0.5 * static_cast<double>(n) * psi(n) - 0.5 * std::norm(exp_a) * psi(n));

    if (p.n_bath > 0.0) {
        const double c2sq = p.gamma * p.n_bath;
        apply_creation(psi, scratch);
        const Complex exp_ad = psi.dot(scratch);  // <a^dag>
        for (int n = 0; n < d; ++n)
            out(n) += c2sq * (std::conj(exp_ad) * scratch(n) -
                              0.5 * static_cast<double>(n + 1) * psi(n) -
                              0.5 * std::norm(exp_ad) * psi(n));
    }
}

}  // namespace detail

inline int qsd_channel_count(const ModelParams& p) { return p.n_bath > 0.0 ? 2 : 1; }

// One stochastic step. The drift is advanced with a classical RK4 stage (the
// plain Euler drift is unstable against the fast Fock-edge phases at the
// default step); the noise term is Euler-Maruyama with the diffusion
// coefficient evaluated in the pre-step state, followed by renormalization.
inline State qsd_step(const State& psi, double t, double dt, const ModelParams& p,
                      std::span<const Complex> noise) {
    const int d = static_cast<int>(psi.size());
    if (d != p.dim) throw std::invalid_argument("qsd_step: psi/params dimension mismatch");
    if (static_cast<int>(noise.size()) != qsd_channel_count(p))
        throw std::invalid_argument("qsd_step: need one noise increment per Lindblad channel");

    State k1(d), k2(d), k3(d), k4(d), scratch(d), stage(d);
    detail::qsd_drift(psi, t, p, k1, scratch);
    stage = psi + (0.5 * dt) * k1;
    detail::qsd_drift(stage, t + 0.5 * dt, p, k2, scratch);
    stage = psi + (0.5 * dt) * k2;
    detail::qsd_drift(stage, t + 0.5 * dt, p, k3, scratch);
    stage = psi + dt * k3;
    detail::qsd_drift(stage, t + dt, p, k4, scratch);

    State next = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    // noise: sum_i (L_i - <L_i>) |psi_pre> dxi_i
    const double c1 = std::sqrt(p.gamma * (p.n_bath + 1.0));
    detail::apply_annihilation(psi, scratch);
    const Complex exp_l1 = c1 * psi.dot(scratch);
    next += noise[0] * (c1 * scratch - exp_l1 * psi);
    if (p.n_bath > 0.0) {
        const double c2 = std::sqrt(p.gamma * p.n_bath);
        detail::apply_creation(psi, scratch);
        const Complex exp_l2 = c2 * psi.dot(scratch);
        next += noise[1] * (c2 * scratch - exp_l2 * psi);
    }

    const double nrm = next.norm();
    if (nrm < 1e-8)
        throw std::runtime_error("qsd_step: norm collapse (" + std::to_string(nrm) +
                                 "); step too large");
    next /= nrm;
    return next;
}

struct QsdConfig {
    int n_traj = 1;
    double step = 5e-4;
    std::uint64_t seed = 0;
    std::vector<double> sample_times;
    // nullopt: estimate the density at every sample time; empty: none.
    std::optional<std::vector<double>> density_times;
    bool zero_noise = false;  // deterministic-limit hook for tests
    int workers = 0;          // 0 = default_worker_count()
};

struct TrajectoryEnsembleResult {
    std::vector<double> sample_times;
    std::vector<double> mean_n;
    std::vector<double> stderr_n;
    std::vector<double> density_times;
    std::vector<Density> density_estimates;
    std::uint64_t seed = 0;
    int n_traj = 0;
    double step = 0.0;
};

// Ensemble of independent trajectories. Trajectory k draws from the stream
// derived from (seed, k); reductions run over fixed contiguous blocks that
// are combined in block order, so results are bit-identical for any worker
// count.
inline TrajectoryEnsembleResult run_ensemble(const State& psi0, const QsdConfig& cfg,
                                             const ModelParams& p) {
    if (cfg.n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
    if (cfg.step <= 0.0) throw std::invalid_argument("run_ensemble: step must be positive");
    if (cfg.sample_times.empty())
        throw std::invalid_argument("run_ensemble: empty sample schedule");
    for (std::size_t i = 1; i < cfg.sample_times.size(); ++i)
        if (cfg.sample_times[i] <= cfg.sample_times[i - 1])
            throw std::invalid_argument("run_ensemble: sample times must increase");
    if (psi0.size() != p.dim)
        throw std::invalid_argument("run_ensemble: psi0/params dimension mismatch");

    const double t0 = cfg.sample_times.front();
    const double dt = cfg.step;
    const int d = p.dim;
    const int n_channels = qsd_channel_count(p);

    const std::vector<double>& dens_times =
        cfg.density_times ? *cfg.density_times : cfg.sample_times;

    const std::size_t n_samples = cfg.sample_times.size();
    const std::size_t n_dens = dens_times.size();

    std::vector<long> sample_steps(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        sample_steps[i] = std::lround((cfg.sample_times[i] - t0) / dt);
    std::vector<long> dens_steps(n_dens);
    for (std::size_t i = 0; i < n_dens; ++i) {
        dens_steps[i] = std::lround((dens_times[i] - t0) / dt);
        if (dens_steps[i] < 0 || dens_steps[i] > sample_steps.back())
            throw std::invalid_argument("run_ensemble: density time outside sample window");
    }
    const long last_step = sample_steps.back();

    // Fixed block partition, independent of worker count.
    const int n_blocks = std::min(cfg.n_traj, 64);
    const int per_block = (cfg.n_traj + n_blocks - 1) / n_blocks;

    struct BlockAcc {
        std::vector<double> sum_n, sum_n2;
        std::vector<Density> dens;
    };
    std::vector<BlockAcc> acc(static_cast<std::size_t>(n_blocks));

    std::mutex err_mutex;
    std::string first_error;

    auto simulate_block = [&](int b) {
        try {
            BlockAcc& a = acc[static_cast<std::size_t>(b)];
            a.sum_n.assign(n_samples, 0.0);
            a.sum_n2.assign(n_samples, 0.0);
            a.dens.assign(n_dens, Density::Zero(d, d));
            const int k_lo = b * per_block;
            const int k_hi = std::min(cfg.n_traj, (b + 1) * per_block);
            std::vector<Complex> noise(static_cast<std::size_t>(n_channels), Complex{0.0, 0.0});
            for (int k = k_lo; k < k_hi; ++k) {
                GaussianStream rng(cfg.seed, static_cast<std::uint64_t>(k));
                State psi = psi0;
                psi /= psi.norm();
                long step_idx = 0;
                std::size_t next_sample = 0, next_dens = 0;
                try {
                    for (;;) {
                        while (next_sample < n_samples && sample_steps[next_sample] == step_idx) {
                            double nbar = 0.0;
                            for (int n = 0; n < d; ++n) nbar += n * std::norm(psi(n));
                            a.sum_n[next_sample] += nbar;
                            a.sum_n2[next_sample] += nbar * nbar;
                            ++next_sample;
                        }
                        while (next_dens < n_dens && dens_steps[next_dens] == step_idx) {
                            a.dens[next_dens].noalias() += psi * psi.adjoint();
                            ++next_dens;
                        }
                        if (step_idx >= last_step) break;
                        const double t = t0 + static_cast<double>(step_idx) * dt;
                        if (cfg.zero_noise) {
                            for (auto& z : noise) z = Complex{0.0, 0.0};
                        } else {
                            for (auto& z : noise) z = rng.wiener_increment(dt);
                        }
                        psi = qsd_step(psi, t, dt, p, noise);
                        ++step_idx;
                    }
                } catch (const std::exception& e) {
                    throw std::runtime_error("trajectory " + std::to_string(k) + ": " + e.what());
                }
            }
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (first_error.empty()) first_error = e.what();
        }
    };

    const int workers = cfg.workers > 0 ? cfg.workers : default_worker_count();
    run_blocks(n_blocks, workers, simulate_block);
    if (!first_error.empty()) throw std::runtime_error("run_ensemble: " + first_error);

    TrajectoryEnsembleResult res;
    res.sample_times.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        res.sample_times[i] = t0 + static_cast<double>(sample_steps[i]) * dt;
    res.density_times.resize(n_dens);
    for (std::size_t i = 0; i < n_dens; ++i)
        res.density_times[i] = t0 + static_cast<double>(dens_steps[i]) * dt;
    res.seed = cfg.seed;
    res.n_traj = cfg.n_traj;
    res.step = dt;

    const double m = static_cast<double>(cfg.n_traj);
    res.mean_n.assign(n_samples, 0.0);
    res.stderr_n.assign(n_samples, 0.0);
    std::vector<double> sum_n(n_samples, 0.0), sum_n2(n_samples, 0.0);
    for (int b = 0; b < n_blocks; ++b) {
        for (std::size_t i = 0; i < n_samples; ++i) {
            sum_n[i] += acc[static_cast<std::size_t>(b)].sum_n[i];
            sum_n2[i] += acc[static_cast<std::size_t>(b)].sum_n2[i];
        }
    }
    for (std::size_t i = 0; i < n_samples; ++i) {
        res.mean_n[i] = sum_n[i] / m;
        if (cfg.n_traj > 1) {
            const double var = std::max(0.0, (sum_n2[i] - sum_n[i] * sum_n[i] / m) / (m - 1.0));
            res.stderr_n[i] = std::sqrt(var / m);
        }
    }

    res.density_estimates.assign(n_dens, Density::Zero(d, d));
    for (std::size_t i = 0; i < n_dens; ++i) {
        for (int b = 0; b < n_blocks; ++b)
            res.density_estimates[i] += acc[static_cast<std::size_t>(b)].dens[i];
        res.density_estimates[i] /= m;
    }
    return res;
}

}  // namespace pdnr
