#include "qnd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qnd/error.hpp"

namespace qnd {

namespace {

constexpr double kFarSpacing = 0.05;
constexpr double kEndInset = 1e-9; // fraction of the local spacing

double simpson_weight(std::size_t k, std::size_t m, double h)
{
    if (k == 0 || k == m)
        return h / 3.0;
    return (k % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
}

double three_eighths_weight(std::size_t k, double h)
{
    return (k == 0 || k == 3) ? 3.0 * h / 8.0 : 9.0 * h / 8.0;
}

// Rule on [0, s] with s odd: Simpson up to s-3, then a 3/8 panel.
double left_piece_weight(std::size_t k, std::size_t s, double h)
{
    if (s == 1)
        return 0.5 * h;
    const std::size_t p = s - 3;
    double w = 0.0;
    if (p > 0 && k <= p)
        w += simpson_weight(k, p, h);
    if (k >= p)
        w += three_eighths_weight(k - p, h);
    return w;
}

// Rule on [0, t] with t odd: a 3/8 panel, then Simpson from 3.
double right_piece_weight(std::size_t k, std::size_t t, double h)
{
    if (t == 1)
        return 0.5 * h;
    double w = 0.0;
    if (k <= 3)
        w += three_eighths_weight(k, h);
    if (k >= 3 && t > 3)
        w += simpson_weight(k - 3, t - 3, h);
    return w;
}

} // namespace

double uniform_rule(const double *f, std::size_t m, double h)
{
    if (m == 0)
        return 0.0;
    if (m == 1)
        return 0.5 * h * (f[0] + f[1]);
    const std::size_t simpson = (m % 2 == 0) ? m : m - 3;
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i < simpson; i += 2)
        odd += f[i];
    for (std::size_t i = 2; i < simpson; i += 2)
        even += f[i];
    double sum = simpson > 0 ? h / 3.0 * (f[0] + 4.0 * odd + 2.0 * even + f[simpson]) : 0.0;
    if (simpson != m) {
        const double *g = f + simpson;
        sum += 3.0 * h / 8.0 * (g[0] + 3.0 * g[1] + 3.0 * g[2] + g[3]);
    }
    return sum;
}

Mesh Mesh::from_segments(std::span<const double> breaks, std::span<const double> spacing)
{
    if (breaks.size() < 2 || spacing.size() + 1 != breaks.size())
        throw InvalidArgument("mesh: need n+1 breakpoints for n spacings");
    Mesh mesh;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k];
        const double b = breaks[k + 1];
        if (!(b > a) || !(spacing[k] > 0.0))
            throw InvalidArgument("mesh: breakpoints must increase and spacings be positive");
        auto m = std::max<std::size_t>(
            2, static_cast<std::size_t>(std::ceil((b - a) / spacing[k] - 1e-9)));
        m += m % 2;
        const double h = (b - a) / static_cast<double>(m);
        mesh.segments_.push_back({mesh.x_.size(), m, h});
        mesh.x_.push_back(a + kEndInset * h);
        for (std::size_t i = 1; i < m; ++i)
            mesh.x_.push_back(a + h * static_cast<double>(i));
        mesh.x_.push_back(b - kEndInset * h);
    }
    mesh.finalize();
    return mesh;
}

Mesh Mesh::build(const Grid &grid, std::span<const PulseSpec> pulses, double scale)
{
    grid.validate();
    const double h = grid.spacing() * scale;
    const double h_ref = reference_spacing(pulses);
    const double h_far = std::max(h, kFarSpacing * h / h_ref);
    const bool refine_cores = h_far > h;

    std::vector<double> breaks{grid.lo, grid.hi};
    std::vector<std::pair<double, double>> cores;
    for (const auto &p : pulses) {
        for (double e : p.edges())
            breaks.push_back(e);
        if (refine_cores) {
            cores.emplace_back(p.support_lo(), p.support_hi());
            breaks.push_back(p.support_lo());
            breaks.push_back(p.support_hi());
        }
    }
    std::erase_if(breaks, [&](double b) { return b < grid.lo || b > grid.hi; });
    std::sort(breaks.begin(), breaks.end());
    const double merge = 1e-9 * (grid.hi - grid.lo);
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [&](double a, double b) { return b - a <= merge; }),
                 breaks.end());
    breaks.front() = grid.lo;
    breaks.back() = grid.hi;

    std::vector<double> spacing;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double mid = 0.5 * (breaks[k] + breaks[k + 1]);
        const bool in_core = std::any_of(cores.begin(), cores.end(), [&](const auto &c) {
            return mid >= c.first && mid <= c.second;
        });
        spacing.push_back(in_core ? h : h_far);
    }
    return from_segments(breaks, spacing);
}

void Mesh::finalize()
{
    w_.assign(x_.size(), 0.0);
    segment_of_.assign(x_.size(), 0);
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const auto &seg = segments_[s];
        for (std::size_t k = 0; k <= seg.m; ++k) {
            w_[seg.begin + k] = simpson_weight(k, seg.m, seg.h);
            segment_of_[seg.begin + k] = s;
        }
    }
}

double Mesh::integrate(std::span<const double> f) const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        sum += w_[i] * f[i];
    return sum;
}

Mesh::SplitCorrection Mesh::split_correction(std::size_t i) const
{
    SplitCorrection c;
    const auto &seg = segments_[segment_of_[i]];
    const std::size_t s = i - seg.begin;
    // Splitting at an even offset reproduces the plain Simpson weights.
    if (s % 2 == 0)
        return c;
    const std::size_t t = seg.m - s;
    const std::size_t lo = s >= 3 ? s - 3 : 0;
    const std::size_t hi = std::min(seg.m, s + 3);
    c.first = seg.begin + lo;
    c.count = hi - lo + 1;
    for (std::size_t k = lo; k <= hi; ++k) {
        double w = 0.0;
        if (k <= s)
            w += left_piece_weight(k, s, seg.h);
        if (k >= s)
            w += right_piece_weight(k - s, t, seg.h);
        c.delta[k - lo] = w - simpson_weight(k, seg.m, seg.h);
    }
    return c;
}

double Mesh::integrate_split(std::span<const double> f, std::size_t i) const
{
    double sum = integrate(f);
    const auto c = split_correction(i);
    for (std::size_t k = 0; k < c.count; ++k)
        sum += c.delta[k] * f[c.first + k];
    return sum;
}

double erfcx(double z)
{
    if (z < 3.0)
        return std::exp(z * z) * std::erfc(z);
    // erfc(z) = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    double t = z;
    for (int n = 120; n >= 1; --n)
        t = z + 0.5 * n / t;
    return 1.0 / (std::sqrt(std::numbers::pi) * t);
}

AdaptiveResult integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                                  double rel_tol, unsigned max_depth)
{
    AdaptiveResult out;
    if (a == b)
        return out;
    double l1 = 0.0;
    out.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, rel_tol, &out.error, &l1);
    if (!std::isfinite(out.value) || out.error > rel_tol * std::max(l1, 1e-300))
        throw ConvergenceError("adaptive quadrature did not converge",
                               out.error / std::max(l1, 1e-300), rel_tol);
    return out;
}

} // namespace qnd
