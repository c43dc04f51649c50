#include "qnd/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qnd/error.hpp"

namespace qnd {

namespace {

constexpr double kGaussianCoreWidths = 5.0;
constexpr double kMaxSpacing = 0.05;
constexpr double kSamplesPerDuration = 50.0;
constexpr double kMarginDurations = 5.0;
constexpr double kMarginFixed = 20.0;

} // namespace

std::string to_string(Shape shape)
{
    return shape == Shape::Gaussian ? "gaussian" : "rectangular";
}

Shape parse_shape(const std::string &name)
{
    if (name == "gaussian" || name == "Gaussian")
        return Shape::Gaussian;
    if (name == "rectangular" || name == "Rectangular" || name == "rect")
        return Shape::Rectangular;
    throw InvalidArgument("unknown pulse shape '" + name + "'");
}

void PulseSpec::validate() const
{
    if (!std::isfinite(duration) || duration <= 0.0)
        throw InvalidArgument("pulse duration must be positive and finite");
    if (!std::isfinite(center))
        throw InvalidArgument("pulse center must be finite");
}

std::vector<double> PulseSpec::edges() const
{
    if (shape == Shape::Rectangular)
        return {center - 0.5 * duration, center + 0.5 * duration};
    return {};
}

double PulseSpec::support_lo() const
{
    return shape == Shape::Rectangular ? center - 0.5 * duration
                                       : center - kGaussianCoreWidths * duration;
}

double PulseSpec::support_hi() const
{
    return shape == Shape::Rectangular ? center + 0.5 * duration
                                       : center + kGaussianCoreWidths * duration;
}

PulseSpec gaussian_pulse(double duration, double center)
{
    PulseSpec spec{Shape::Gaussian, duration, center};
    spec.validate();
    return spec;
}

PulseSpec rectangular_pulse(double duration, double center)
{
    PulseSpec spec{Shape::Rectangular, duration, center};
    spec.validate();
    return spec;
}

void Grid::validate() const
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw InvalidArgument("grid requires finite lo < hi");
    if (n < 2)
        throw InvalidArgument("grid requires at least two samples");
}

std::vector<double> Grid::nodes() const
{
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = at(i);
    xs.back() = hi;
    return xs;
}

double pulse_amplitude(const PulseSpec &spec, double x)
{
    if (!std::isfinite(x))
        throw InvalidArgument("pulse_amplitude: non-finite coordinate");
    const double d = spec.duration;
    const double u = x - spec.center;
    if (spec.shape == Shape::Gaussian) {
        const double norm = std::sqrt(2.0 / (d * std::sqrt(std::numbers::pi)));
        return norm * std::exp(-2.0 * u * u / (d * d));
    }
    return std::abs(u) <= 0.5 * d ? 1.0 / std::sqrt(d) : 0.0;
}

double reference_spacing(std::span<const PulseSpec> specs)
{
    double h = kMaxSpacing;
    for (const auto &s : specs)
        h = std::min(h, s.duration / kSamplesPerDuration);
    return h;
}

Grid default_grid(const PulseSpec &signal, const PulseSpec &ancilla)
{
    signal.validate();
    ancilla.validate();
    const double margin =
        kMarginDurations * std::max(signal.duration, ancilla.duration) + kMarginFixed;
    const PulseSpec both[] = {signal, ancilla};
    const double h = reference_spacing(both);

    Grid grid;
    grid.lo = std::min(signal.center, ancilla.center) - margin;
    grid.hi = std::max(signal.center, ancilla.center) + margin;
    auto intervals = static_cast<std::size_t>(std::ceil((grid.hi - grid.lo) / h - 1e-9));
    intervals += intervals % 2;
    grid.n = intervals + 1;
    return grid;
}

Grid default_grid(const PulseSpec &spec)
{
    return default_grid(spec, spec);
}

} // namespace qnd
