#ifndef QND_QUADRATURE_HPP
#define QND_QUADRATURE_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qnd/pulses.hpp"

namespace qnd {

// Piecewise-uniform node set. The axis is cut at breakpoints (pulse edges,
// boundaries of refined cores); each segment is sampled uniformly with an even
// number of intervals and integrated by composite Simpson. Segments own their
// end samples, which sit a hair inside the segment so that a function with a
// jump at a breakpoint is sampled by its one-sided limits.
class Mesh {
public:
    // Spacing grid.spacing()·scale inside pulse cores, coarser far field when
    // the grid was refined only to resolve a short pulse. scale = 2 gives the
    // companion mesh for a doubling check.
    static Mesh build(const Grid &grid, std::span<const PulseSpec> pulses, double scale = 1.0);

    // Segments [breaks[k], breaks[k+1]] with target spacing spacing[k].
    static Mesh from_segments(std::span<const double> breaks, std::span<const double> spacing);

    std::size_t size() const { return x_.size(); }
    std::span<const double> nodes() const { return x_; }
    double node(std::size_t i) const { return x_[i]; }
    std::span<const double> weights() const { return w_; }
    double lo() const { return x_.front(); }
    double hi() const { return x_.back(); }

    double integrate(std::span<const double> f) const;

    // Weight changes when node i becomes an extra breakpoint (for integrands
    // with a kink at x_i). Nonzero only on i-3..i+3.
    struct SplitCorrection {
        std::size_t first = 0;
        std::size_t count = 0;
        std::array<double, 7> delta{};
    };
    SplitCorrection split_correction(std::size_t i) const;
    double integrate_split(std::span<const double> f, std::size_t i) const;

private:
    struct Segment {
        std::size_t begin;
        std::size_t m;
        double h;
    };

    Mesh() = default;
    void finalize();

    std::vector<double> x_;
    std::vector<double> w_;
    std::vector<Segment> segments_;
    std::vector<std::size_t> segment_of_;
};

// Composite rule on m+1 equally spaced samples: Simpson for even m, Simpson
// plus a closing 3/8 panel for odd m >= 3, trapezoid for m = 1.
double uniform_rule(const double *f, std::size_t m, double h);

// e^{z²}·erfc(z), stable for large positive z.
double erfcx(double z);

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss–Kronrod (7/15) on [a, b]. Throws ConvergenceError when the
// error estimate exceeds rel_tol times the L1 norm of the integrand.
AdaptiveResult integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                                  double rel_tol, unsigned max_depth = 15);

} // namespace qnd

#endif // QND_QUADRATURE_HPP
