#ifndef QND_ORACLE_HPP
#define QND_ORACLE_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "qnd/one_photon.hpp"
#include "qnd/pulses.hpp"
#include "qnd/two_photon.hpp"

namespace qnd {

// g and κ are taken in units of Γ; g = r, κ = r² keeps g²/κ = 1 at κ/g = r.
struct FullModelOptions {
    double t_final = 0.0;      // 0: 2|r0| + 40
    double k_cutoff = 0.0;     // 0: max(20/d, 10κ)
    double core_spacing = 0.0; // 0: min(0.1/d, π/(t_final + |r0|))
    double core_extent = 15.0; // uniform region |k| <= core_extent/d
    double growth = 1.05;      // spacing ratio beyond the core
    double dt_factor = 0.5;    // first step = dt_factor / K
    double tolerance = 1e-8;   // step-halving target on output probabilities
    int max_halvings = 4;
    double norm_tolerance = 1e-6;
};

struct FullModelState {
    std::complex<double> excited_amp;
    std::complex<double> cavity_amp;
    std::vector<double> k_grid;
    std::vector<double> k_weight;
    std::vector<std::complex<double>> field_L; // ψ(k), reflection side
    std::vector<std::complex<double>> field_R; // φ(k), transmission side
    double r0 = 0.0;
    double t_final = 0.0;
    double dt = 0.0;
    double step_error = 0.0;
    double norm_drift = 0.0;

    double norm() const;
    double p_L() const;
    double p_R() const;
    // Far-field amplitude in the co-moving coordinate of the input pulse,
    // with the mirror's π phase applied.
    std::complex<double> output_amplitude(Side side, double x) const;
};

// Single photon through the full atom-cavity Hamiltonian on a discretized
// k-grid (uniform core, geometric wings). RK4 with step halving.
FullModelState full_model_propagate(const CavityParams &params, const PulseSpec &spec,
                                    const FullModelOptions &opt = {});

// Fourier amplitude of the input pulse, (1/√2π)∫Ψ(x)e^{-ikx}dx.
std::complex<double> pulse_spectrum(const PulseSpec &spec, double k);

// Finite-κ transmission coefficient of the full model (steady state).
std::complex<double> full_model_transmission(const CavityParams &params, double k);

// Direct midpoint Riemann sums of the kernel integrals, n points per axis.
double brute_force_one_photon(const PulseSpec &spec, Side side, double x, std::size_t n = 4000);
double brute_force_nonlinear(const PulseSpec &spec1, const PulseSpec &spec2, double x1, double x2,
                             std::size_t n = 4000);
double brute_force_two_photon(const PulseSpec &spec1, const PulseSpec &spec2, Channel ch,
                              double x1, double x2, std::size_t n = 4000,
                              bool include_nonlinear = true);

} // namespace qnd

#endif // QND_ORACLE_HPP
