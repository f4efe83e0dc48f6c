#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include "pdnr/fock.hpp"
#include "pdnr/io.hpp"

namespace pdnr {

// Train of Gaussian pulses: f(t) = sum_n exp(-(t - t0 - n*sep)^2 / width^2),
// n >= 0. count = nullopt means "auto": every pulse whose center lies within
// 8*width of the evaluation time contributes (neglected tails < e^-64).
struct PulseTrain {
    double t0 = 0.0;
    double width = 1.0;       // T
    double separation = 1.0;  // tau
    std::optional<int> count; // nullopt = auto

    bool valid() const { return width > 0.0 && separation > 0.0 && (!count || *count >= 1); }
};

// Full parameter set of the driven Kerr resonator in the rotating frame.
// Drive amplitude Omega = sqrt(intensity) * exp(i*phase) * gamma.
struct ModelParams {
    double delta = 0.0;      // detuning, units gamma
    double chi = 0.0;        // Kerr strength, units gamma
    double intensity = 0.0;  // I = |Omega|^2 / gamma^2
    double phase = 0.0;      // Phi, radians
    double gamma = 1.0;      // dissipation rate (internal unit)
    double n_bath = 0.0;     // N, mean reservoir quanta
    int dim = 40;            // Fock truncation D
    std::optional<PulseTrain> pulse;  // nullopt = cw, f(t) == 1
    // Plug-in envelope hook; overrides pulse/cw when set. Not serializable.
    std::function<double(double)> custom_envelope;

    Complex omega() const {
        return std::sqrt(intensity) * std::exp(kI * phase) * gamma;
    }
};

inline double pulse_envelope(double t, const PulseTrain& train) {
    if (!train.valid()) throw std::invalid_argument("pulse_envelope: invalid pulse train");
    if (!std::isfinite(t)) throw std::invalid_argument("pulse_envelope: t must be finite");
    // Only pulses with |t - center| <= 8*width matter at 1e-12 resolution.
    const double reach = 8.0 * train.width;
    long lo = static_cast<long>(std::ceil((t - train.t0 - reach) / train.separation));
    long hi = static_cast<long>(std::floor((t - train.t0 + reach) / train.separation));
    if (lo < 0) lo = 0;
    if (train.count) hi = std::min(hi, static_cast<long>(*train.count) - 1);
    double f = 0.0;
    for (long n = lo; n <= hi; ++n) {
        const double u = (t - train.t0 - static_cast<double>(n) * train.separation) / train.width;
        f += std::exp(-u * u);
    }
    return f;
}

inline double envelope_at(double t, const ModelParams& p) {
    if (p.custom_envelope) return p.custom_envelope(t);
    return p.pulse ? pulse_envelope(t, *p.pulse) : 1.0;
}

// H(t) = delta*n + chi*n^2 + f(t)*(Omega a^dag^2 + Omega* a^2)
inline Operator hamiltonian_at(double t, const ModelParams& p) {
    require_dim(p.dim, 2, "hamiltonian_at");
    const double f = envelope_at(t, p);
    const Complex om = p.omega();
    Operator h = Operator::Zero(p.dim, p.dim);
    for (int n = 0; n < p.dim; ++n)
        h(n, n) = p.delta * n + p.chi * static_cast<double>(n) * static_cast<double>(n);
    for (int n = 0; n + 2 <= p.dim - 1; ++n) {
        const double s = std::sqrt(static_cast<double>(n + 1) * static_cast<double>(n + 2));
        h(n + 2, n) += f * om * s;        // a^dag^2
        h(n, n + 2) += f * std::conj(om) * s;  // a^2
    }
    return h;
}

enum class Regime { kRegular, kBistableProne, kChaoticCandidate };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::kRegular: return "regular";
        case Regime::kBistableProne: return "bistable-prone";
        case Regime::kChaoticCandidate: return "chaotic-candidate";
    }
    return "?";
}

struct RegimeReport {
    Regime label = Regime::kRegular;
    bool boundary_warning = false;  // delta == 0
    // Tested quantities, for diagnostic printing.
    double delta = 0.0;
    double omega_over_delta = 0.0;  // 0 when delta == 0
    double tau_over_width = 0.0;    // 0 when cw
    bool omega_in_band = false;     // |Omega| within factor two of |delta|
    bool tau_in_band = false;       // tau/T in [pi/2, 2*pi]
};

// Heuristic classification. The factor-two band around |Omega| ~ |delta| is
// a quantification knob, reported as such in the diagnostics.
inline RegimeReport classify_regime(const ModelParams& p) {
    RegimeReport r;
    r.delta = p.delta;
    const double abs_omega = std::abs(p.omega());
    if (p.delta != 0.0) r.omega_over_delta = abs_omega / std::abs(p.delta);
    if (p.pulse) r.tau_over_width = p.pulse->separation / p.pulse->width;
    r.omega_in_band = p.delta != 0.0 && r.omega_over_delta >= 0.5 && r.omega_over_delta <= 2.0;
    r.tau_in_band =
        p.pulse && r.tau_over_width >= M_PI / 2.0 && r.tau_over_width <= 2.0 * M_PI;
    if (p.delta == 0.0) {
        r.label = Regime::kRegular;
        r.boundary_warning = true;
    } else if (p.delta > 0.0) {
        r.label = Regime::kRegular;
    } else {
        r.label = (r.omega_in_band && r.tau_in_band) ? Regime::kChaoticCandidate
                                                     : Regime::kBistableProne;
    }
    return r;
}

// Stable fingerprint of the physical parameters, stamped into output files.
inline std::uint64_t params_hash(const ModelParams& p) {
    std::ostringstream ss;
    ss.precision(17);
    ss << p.delta << '|' << p.chi << '|' << p.intensity << '|' << p.phase << '|' << p.gamma
       << '|' << p.n_bath << '|' << p.dim << '|';
    if (p.pulse) {
        ss << p.pulse->t0 << '|' << p.pulse->width << '|' << p.pulse->separation << '|';
        if (p.pulse->count) ss << *p.pulse->count;
        else ss << "auto";
    } else {
        ss << "cw";
    }
    return fnv1a64(ss.str());
}

}  // namespace pdnr
