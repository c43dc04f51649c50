#include "qnd/one_photon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qnd/error.hpp"

namespace qnd {

namespace {

constexpr double kAdaptiveWidths = 10.0;
constexpr int kMaxRefinements = 2; // mesh halvings before giving up

double gaussian_absorbed(double d, double u)
{
    const double a = 2.0 / (d * d);
    const double norm = std::sqrt(2.0 / (d * std::sqrt(std::numbers::pi)));
    const double pre = -0.25 * norm * std::sqrt(std::numbers::pi / a);
    const double z = std::sqrt(a) * (u + 0.25 / a);
    if (z < 3.0)
        return pre * std::exp(0.5 * u + 0.0625 / a) * std::erfc(z);
    return pre * std::exp(-a * u * u) * erfcx(z);
}

double rectangular_absorbed(double d, double lo, double hi, double x)
{
    if (x >= hi)
        return 0.0;
    const double start = std::max(x, lo);
    return -(std::exp(-0.5 * (start - x)) - std::exp(-0.5 * (hi - x))) / std::sqrt(d);
}

struct Probabilities {
    double p_L;
    double p_R;
};

Probabilities integrate_on(const Mesh &mesh, const PulseSpec &spec, std::vector<double> *x,
                           std::vector<double> *amp_L, std::vector<double> *amp_R)
{
    const std::size_t n = mesh.size();
    std::vector<double> fl(n), fr(n);
    if (x) {
        x->resize(n);
        amp_L->resize(n);
        amp_R->resize(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = mesh.node(i);
        const double l = absorbed_amplitude(spec, xi);
        const double r = pulse_amplitude(spec, xi) + l;
        fl[i] = l * l;
        fr[i] = r * r;
        if (x) {
            (*x)[i] = xi;
            (*amp_L)[i] = l;
            (*amp_R)[i] = r;
        }
    }
    return {mesh.integrate(fl), mesh.integrate(fr)};
}

} // namespace

void CavityParams::validate() const
{
    if (!std::isfinite(g) || g <= 0.0 || !std::isfinite(kappa) || kappa <= 0.0)
        throw InvalidArgument("cavity rates g and kappa must be positive");
}

double absorbed_amplitude(const PulseSpec &spec, double x)
{
    spec.validate();
    if (!std::isfinite(x))
        throw InvalidArgument("absorbed_amplitude: non-finite coordinate");
    if (spec.shape == Shape::Gaussian)
        return gaussian_absorbed(spec.duration, x - spec.center);
    const auto e = spec.edges();
    return rectangular_absorbed(spec.duration, e[0], e[1], x);
}

double absorbed_amplitude_quadrature(const PulseSpec &spec, double x, double rel_tol)
{
    spec.validate();
    if (!std::isfinite(x))
        throw InvalidArgument("absorbed_amplitude: non-finite coordinate");
    double lo = 0.0;
    double hi = 0.0;
    if (spec.shape == Shape::Gaussian) {
        lo = spec.center - kAdaptiveWidths * spec.duration;
        hi = spec.center + kAdaptiveWidths * spec.duration;
    } else {
        const auto e = spec.edges();
        lo = e[0];
        hi = e[1];
    }
    lo = std::max(lo, x);
    if (lo >= hi)
        return 0.0;
    auto kernel = [&](double xp) { return std::exp(-0.5 * (xp - x)) * pulse_amplitude(spec, xp); };
    double sum = 0.0;
    // Split at the peak so the Gaussian core is never straddled by one panel.
    if (spec.shape == Shape::Gaussian && spec.center > lo && spec.center < hi) {
        sum += integrate_adaptive(kernel, lo, spec.center, rel_tol).value;
        sum += integrate_adaptive(kernel, spec.center, hi, rel_tol).value;
    } else {
        sum = integrate_adaptive(kernel, lo, hi, rel_tol).value;
    }
    return -0.5 * sum;
}

OnePhotonResult one_photon_output(const PulseSpec &spec, const Grid &grid, double tol)
{
    spec.validate();
    const PulseSpec pulses[] = {spec};
    OnePhotonResult res;
    double scale = 1.0;
    for (int level = 0;; ++level, scale *= 0.5) {
        const Mesh fine = Mesh::build(grid, pulses, scale);
        const Mesh coarse = Mesh::build(grid, pulses, 2.0 * scale);
        const auto p = integrate_on(fine, spec, &res.x, &res.amp_L, &res.amp_R);
        const auto q = integrate_on(coarse, spec, nullptr, nullptr, nullptr);
        res.p_L = p.p_L;
        res.p_R = p.p_R;
        res.error = std::max(std::abs(p.p_L - q.p_L), std::abs(p.p_R - q.p_R)) / 15.0;
        if (res.error <= tol)
            return res;
        if (level == kMaxRefinements)
            throw ConvergenceError("one-photon probabilities not converged", res.error, tol);
    }
}

OnePhotonResult one_photon_output(const PulseSpec &spec, double tol)
{
    return one_photon_output(spec, default_grid(spec), tol);
}

SpectralCoefficients spectral_coefficients(double k)
{
    const std::complex<double> den(0.5, k);
    return {-0.5 / den, std::complex<double>(0.0, k) / den};
}

} // namespace qnd
