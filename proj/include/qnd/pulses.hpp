#ifndef QND_PULSES_HPP
#define QND_PULSES_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qnd {

// All lengths and durations are in units of c/Γ (with c = 1, Γ = 1), so a
// duration of 40 means 40/Γ. Coordinates are co-moving: x = r - ct.

enum class Shape { Gaussian, Rectangular };

std::string to_string(Shape shape);
Shape parse_shape(const std::string &name);

// Single-photon input wave-packet. Amplitudes are real and unit-normalized.
struct PulseSpec {
    Shape shape = Shape::Gaussian;
    double duration = 1.0;
    double center = 0.0;

    void validate() const;

    // Breakpoints where the amplitude (or its derivatives) is discontinuous.
    std::vector<double> edges() const;
    // Interval outside of which the amplitude is numerically zero.
    double support_lo() const;
    double support_hi() const;
};

PulseSpec gaussian_pulse(double duration, double center = 0.0);
PulseSpec rectangular_pulse(double duration, double center = 0.0);

// Uniform sampling of the co-moving axis.
struct Grid {
    double lo = -1.0;
    double hi = 1.0;
    std::size_t n = 2;

    void validate() const;
    double spacing() const { return (hi - lo) / static_cast<double>(n - 1); }
    double at(std::size_t i) const { return lo + spacing() * static_cast<double>(i); }
    std::vector<double> nodes() const;
};

// Ψ_in(x). Throws InvalidArgument for non-finite x.
double pulse_amplitude(const PulseSpec &spec, double x);

// Largest spacing the default grid allows for the given pulses:
// min(0.05, min(d) / 50).
double reference_spacing(std::span<const PulseSpec> specs);

// Symmetric window of half-width 5·max(d) + 20 around the pulse centers,
// with spacing <= reference_spacing() and an even number of intervals.
Grid default_grid(const PulseSpec &signal, const PulseSpec &ancilla);
Grid default_grid(const PulseSpec &spec);

} // namespace qnd

#endif // QND_PULSES_HPP
