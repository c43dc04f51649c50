#include <doctest.h>

#include <cmath>
#include <vector>

#include "qnd/error.hpp"
#include "qnd/quadrature.hpp"

using namespace qnd;

namespace {

double cubic(double x) { return 2.0 - x + 0.5 * x * x - 0.25 * x * x * x; }
double cubic_antideriv(double x)
{
    return 2.0 * x - 0.5 * x * x + x * x * x / 6.0 - x * x * x * x / 16.0;
}

std::vector<double> sample(const Mesh &m, double (*f)(double))
{
    std::vector<double> v(m.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = f(m.node(i));
    return v;
}

} // namespace

TEST_CASE("uniform rule is exact for cubics at every panel count")
{
    for (std::size_t m = 2; m <= 9; ++m) {
        const double a = -1.0, h = 0.37;
        std::vector<double> f(m + 1);
        for (std::size_t i = 0; i <= m; ++i)
            f[i] = cubic(a + h * static_cast<double>(i));
        const double exact = cubic_antideriv(a + h * m) - cubic_antideriv(a);
        CHECK(uniform_rule(f.data(), m, h) == doctest::Approx(exact).epsilon(1e-13));
    }
    const double lin[] = {1.0, 3.0};
    CHECK(uniform_rule(lin, 1, 2.0) == doctest::Approx(4.0));
}

TEST_CASE("segmented mesh integrates cubics exactly")
{
    const double breaks[] = {-3.0, -1.2, 0.0, 2.5};
    const double spacing[] = {0.1, 0.07, 0.3};
    const Mesh m = Mesh::from_segments(breaks, spacing);
    const auto f = sample(m, cubic);
    CHECK(m.integrate(f) ==
          doctest::Approx(cubic_antideriv(2.5) - cubic_antideriv(-3.0)).epsilon(1e-9));
}

TEST_CASE("split at any node handles a kink there")
{
    const double breaks[] = {-2.0, 0.5, 3.0};
    const double spacing[] = {0.1, 0.05};
    const Mesh m = Mesh::from_segments(breaks, spacing);
    std::vector<double> f(m.size());
    for (std::size_t i = 0; i < m.size(); i += 3) {
        const double xi = m.node(i);
        for (std::size_t j = 0; j < m.size(); ++j)
            f[j] = std::abs(m.node(j) - xi) + m.node(j) * m.node(j);
        const double lo = -2.0, hi = 3.0;
        const double exact = 0.5 * ((xi - lo) * (xi - lo) + (hi - xi) * (hi - xi)) +
                             (hi * hi * hi - lo * lo * lo) / 3.0;
        INFO("i=" << i);
        CHECK(m.integrate_split(f, i) - exact == doctest::Approx(0.0));
    }
}

TEST_CASE("split correction stays local")
{
    const double breaks[] = {0.0, 10.0};
    const double spacing[] = {0.1};
    const Mesh m = Mesh::from_segments(breaks, spacing);
    for (std::size_t i = 1; i + 1 < m.size(); ++i) {
        const auto c = m.split_correction(i);
        if (c.count == 0)
            continue;
        CHECK(c.first + 3 >= i);
        CHECK(c.first + c.count <= i + 4);
        double total = 0.0;
        for (std::size_t k = 0; k < c.count; ++k)
            total += c.delta[k];
        CHECK(std::abs(total) < 1e-14); // constants stay exact
    }
}

TEST_CASE("jumps at breakpoints are sampled one-sided")
{
    const double breaks[] = {-1.0, 0.3, 2.0};
    const double spacing[] = {0.05, 0.05};
    const Mesh m = Mesh::from_segments(breaks, spacing);
    std::vector<double> f(m.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = m.node(i) < 0.3 ? 1.0 : 5.0;
    CHECK(m.integrate(f) == doctest::Approx(1.3 + 5.0 * 1.7).epsilon(1e-8));
}

TEST_CASE("mesh grading follows pulse cores")
{
    const PulseSpec p = gaussian_pulse(0.5);
    const PulseSpec both[] = {p};
    const Grid g = default_grid(p);
    const Mesh m = Mesh::build(g, both);
    CHECK(m.size() < g.n);
    CHECK(m.lo() == doctest::Approx(g.lo));
    CHECK(m.hi() == doctest::Approx(g.hi));
    double widest = 0.0, core = 0.0;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        const double dx = m.node(i + 1) - m.node(i);
        widest = std::max(widest, dx);
        if (std::abs(m.node(i)) < 1.0)
            core = std::max(core, dx);
    }
    CHECK(core <= g.spacing() * 1.0001);
    CHECK(widest <= 0.05 * 1.0001);
}

TEST_CASE("erfcx against the direct product")
{
    for (double z = 0.0; z <= 25.0; z += 0.25) {
        const double direct = std::exp(z * z) * std::erfc(z);
        INFO("z=" << z);
        CHECK(erfcx(z) == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK(erfcx(1e4) == doctest::Approx(1.0 / (1e4 * std::sqrt(M_PI))).epsilon(1e-8));
    CHECK(erfcx(-1.0) == doctest::Approx(std::exp(1.0) * std::erfc(-1.0)));
}

TEST_CASE("adaptive quadrature")
{
    auto ex = [](double x) { return std::exp(x); };
    CHECK(integrate_adaptive(ex, 0.0, 1.0, 1e-12).value == doctest::Approx(M_E - 1.0).epsilon(1e-13));
    CHECK(integrate_adaptive(ex, 1.0, 1.0, 1e-12).value == 0.0);
    auto wild = [](double x) { return std::sin(4000.0 * x) * std::exp(x); };
    try {
        integrate_adaptive(wild, 0.0, 10.0, 1e-14, 0);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError &e) {
        CHECK(e.achieved() > e.requested());
        CHECK(e.requested() == 1e-14);
    }
}
