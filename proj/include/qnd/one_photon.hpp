#ifndef QND_ONE_PHOTON_HPP
#define QND_ONE_PHOTON_HPP

#include <complex>
#include <vector>

#include "qnd/pulses.hpp"
#include "qnd/quadrature.hpp"

namespace qnd {

// Atom-cavity constants. Any consistent rate unit works; gamma() = g²/κ sets
// the dimensionless scale used everywhere else.
struct CavityParams {
    double g = 1.0;
    double kappa = 4.0;

    void validate() const;
    double gamma() const { return g * g / kappa; }
    bool bad_cavity() const { return kappa >= 4.0 * g; }
};

// ψ_abs(x) = -(1/2)∫_x^∞ e^{-(x'-x)/2} Ψ_in(x') dx'. Closed forms for both
// shapes (complementary error function for the Gaussian).
double absorbed_amplitude(const PulseSpec &spec, double x);

// Same integral by adaptive Gauss–Kronrod; throws ConvergenceError.
double absorbed_amplitude_quadrature(const PulseSpec &spec, double x, double rel_tol = 1e-8);

struct OnePhotonResult {
    std::vector<double> x;
    std::vector<double> amp_L; // reflected: ψ_abs
    std::vector<double> amp_R; // transmitted: Ψ_in + ψ_abs
    double p_L = 0.0;
    double p_R = 0.0;
    double error = 0.0; // doubling estimate of the quadrature error
};

// Output amplitudes on the mesh derived from `grid`, probabilities by
// composite Simpson. The mesh is halved up to twice while the doubling
// estimate exceeds `tol`; after that ConvergenceError.
OnePhotonResult one_photon_output(const PulseSpec &spec, const Grid &grid, double tol = 1e-8);
OnePhotonResult one_photon_output(const PulseSpec &spec, double tol = 1e-8);

struct SpectralCoefficients {
    std::complex<double> r;
    std::complex<double> t;
};

// r(k) = -(1/2)/(1/2 + ik), t(k) = ik/(1/2 + ik).
SpectralCoefficients spectral_coefficients(double k);

} // namespace qnd

#endif // QND_ONE_PHOTON_HPP
