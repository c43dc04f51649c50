#include <doctest.h>

#include <cmath>
#include <future>
#include <random>

#include "qnd/error.hpp"
#include "qnd/one_photon.hpp"
#include "qnd/oracle.hpp"
#include "qnd/quadrature.hpp"
#include "qnd/two_photon.hpp"

using namespace qnd;

namespace {

// κ/g = r with g²/κ = 1.
CavityParams ladder_params(double r) { return {r, r * r}; }

double l2_distance(const FullModelState &s, const OnePhotonResult &e, Side side)
{
    const auto &amp = side == Side::L ? e.amp_L : e.amp_R;
    const std::size_t stride = 10;
    std::vector<double> xs, vals;
    for (std::size_t i = 0; i < e.x.size(); i += stride) {
        xs.push_back(e.x[i]);
        vals.push_back(std::norm(s.output_amplitude(side, e.x[i]) - amp[i]));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        sum += 0.5 * (vals[i] + vals[i + 1]) * (xs[i + 1] - xs[i]);
    return std::sqrt(sum);
}

} // namespace

TEST_CASE("pulse spectra are unit norm")
{
    const auto g = gaussian_pulse(8.0, 3.0);
    auto fg = [&](double k) { return std::norm(pulse_spectrum(g, k)); };
    CHECK(integrate_adaptive(fg, -4.0, 0.0, 1e-10).value +
              integrate_adaptive(fg, 0.0, 4.0, 1e-10).value ==
          doctest::Approx(1.0).epsilon(1e-9));
    // sinc² tail beyond |k| = K carries about 4/(π d K).
    const auto r = rectangular_pulse(2.0);
    auto fr = [&](double k) { return std::norm(pulse_spectrum(r, k)); };
    double sum = 0.0;
    for (int j = -100; j < 100; ++j)
        sum += integrate_adaptive(fr, 10.0 * j, 10.0 * (j + 1), 1e-10).value;
    CHECK(sum == doctest::Approx(1.0).epsilon(4.0 / (std::numbers::pi * 2.0 * 1000.0)));
    CHECK(std::abs(pulse_spectrum(r, 0.0)) == doctest::Approx(std::sqrt(2.0 / (2.0 * std::numbers::pi))));
}

TEST_CASE("full-model transmission approaches the effective one")
{
    const auto p = ladder_params(30.0);
    for (double k : {-3.0, -0.5, 0.1, 0.4, 2.0}) {
        const auto eff = spectral_coefficients(k);
        CHECK(std::abs(full_model_transmission(p, k)) ==
              doctest::Approx(std::abs(eff.t)).epsilon(2e-3));
    }
    CHECK(full_model_transmission(p, 0.0) == std::complex<double>(0.0));
}

TEST_CASE("full model at kappa/g = 10, d = 40")
{
    const auto params = ladder_params(10.0);
    const auto spec = gaussian_pulse(40.0);
    const auto s = full_model_propagate(params, spec);
    const auto eff = one_photon_output(spec);

    CHECK(s.norm_drift < 1e-6);
    CHECK(std::abs(s.norm() - 1.0) < 1e-6);
    CHECK(s.step_error <= 1e-8);
    CHECK(std::abs(s.p_R() - eff.p_R) / eff.p_R < 0.05);
    CHECK(s.p_L() + s.p_R() == doctest::Approx(1.0).epsilon(1e-6));

    // Steady-state check: ∫|t(k)|²|Ψ(k)|² with the finite-κ coefficient.
    auto f = [&](double k) {
        return std::norm(full_model_transmission(params, k) * pulse_spectrum(spec, k));
    };
    const double ref = integrate_adaptive(f, -0.5, 0.0, 1e-10).value +
                       integrate_adaptive(f, 0.0, 0.5, 1e-10).value;
    CHECK(s.p_R() == doctest::Approx(ref).epsilon(1e-4));
    // The photon has left the atom and the cavity.
    CHECK(std::norm(s.excited_amp) < 1e-12);
    CHECK(std::norm(s.cavity_amp) < 1e-12);

    const double dist = l2_distance(s, eff, Side::R);
    MESSAGE("L2 distance to the effective output: " << dist);
    CHECK(dist < 1e-4);
}

TEST_CASE("short pulses leave the effective regime")
{
    const auto params = ladder_params(10.0);
    FullModelOptions opt;
    opt.dt_factor = 1.0;
    opt.tolerance = 1e-6;
    double dev[2];
    int k = 0;
    for (double d : {0.5, 40.0}) {
        const auto spec = gaussian_pulse(d);
        const auto s = full_model_propagate(params, spec, opt);
        const double eff = one_photon_output(spec).p_R;
        dev[k++] = std::abs(s.p_R() - eff) / eff;
    }
    MESSAGE("relative p_R deviation d=0.5: " << dev[0] << ", d=40: " << dev[1]);
    CHECK(dev[0] > dev[1]);
}

TEST_CASE("effective-kernel convergence along a kappa/g ladder")
{
    FullModelOptions opt;
    opt.dt_factor = 1.0;
    opt.tolerance = 1e-6;
    const auto spec = gaussian_pulse(40.0);
    const auto eff = one_photon_output(spec);
    const double ladder[] = {4.0, 8.0, 16.0};
    std::vector<std::future<FullModelState>> runs;
    for (double r : ladder)
        runs.push_back(std::async(std::launch::async,
                                  [&, r] { return full_model_propagate(ladder_params(r), spec, opt); }));
    double prev = 1.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const double r = ladder[i];
        const auto s = runs[i].get();
        CHECK(s.norm_drift < 1e-6);
        const double dist = std::hypot(l2_distance(s, eff, Side::L), l2_distance(s, eff, Side::R));
        INFO("kappa/g=" << r << " L2=" << dist);
        CHECK(dist < prev);
        prev = dist;
    }
}

TEST_CASE("unresolved k-grids are rejected")
{
    const auto params = ladder_params(10.0);
    const auto spec = gaussian_pulse(40.0);
    FullModelOptions opt;
    opt.k_cutoff = 50.0; // below 10κ
    CHECK_THROWS_AS(full_model_propagate(params, spec, opt), InvalidArgument);
    opt = {};
    opt.core_spacing = 0.2 / 40.0;
    CHECK_THROWS_AS(full_model_propagate(params, spec, opt), InvalidArgument);
    opt = {};
    opt.max_halvings = 1;
    opt.tolerance = 1e-30;
    CHECK_THROWS_AS(full_model_propagate(ladder_params(2.0), gaussian_pulse(5.0), opt),
                    ConvergenceError);
}

TEST_CASE("brute-force amplitudes match the fast path")
{
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> pos(-15.0, 15.0);
    std::uniform_int_distribution<int> pick(0, 3);
    const auto a = gaussian_pulse(10.0);
    for (int k = 0; k < 20; ++k) {
        const double x1 = pos(rng), x2 = pos(rng);
        const Channel ch = kChannels[static_cast<std::size_t>(pick(rng))];
        const double fast = two_photon_amplitude(a, a, ch, x1, x2);
        const double slow = brute_force_two_photon(a, a, ch, x1, x2);
        INFO(ch.name() << " x1=" << x1 << " x2=" << x2);
        CHECK(std::abs(fast - slow) < 1e-6);
    }
}

TEST_CASE("brute-force linear part factorizes")
{
    const auto a = gaussian_pulse(10.0);
    const auto b = rectangular_pulse(6.0, 1.0);
    for (const auto ch : kChannels) {
        const double lin = brute_force_two_photon(a, b, ch, -2.0, 1.5, 4000, false);
        CHECK(lin == brute_force_one_photon(a, ch.side1, -2.0) *
                         brute_force_one_photon(b, ch.side2, 1.5));
        CHECK(lin == doctest::Approx(two_photon_amplitude(a, b, ch, -2.0, 1.5, false))
                         .epsilon(1e-6)
                         .scale(1.0));
    }
}

TEST_CASE("brute-force nonlinear term for long rectangular pulses")
{
    const double d1 = 160.0, d2 = 40.0;
    const auto p1 = rectangular_pulse(d1);
    const auto p2 = rectangular_pulse(d2);
    for (const auto [x1, x2] : {std::pair{-5.0, -2.0}, {0.0, 0.0}, {3.0, -4.0}}) {
        const double expect = -std::exp(-0.5 * std::abs(x1 - x2)) / std::sqrt(d1 * d2);
        CHECK(brute_force_nonlinear(p1, p2, x1, x2) == doctest::Approx(expect).epsilon(0.01));
    }
    CHECK(brute_force_nonlinear(p1, p2, 30.0, 0.0) == 0.0);
}

TEST_CASE("brute-force quadrature converges")
{
    const auto a = gaussian_pulse(10.0);
    const double x1 = -3.0, x2 = 2.0;
    const double fast = nonlinear_amplitude(a, a, x1, x2);
    const double e1 = std::abs(brute_force_nonlinear(a, a, x1, x2, 1000) - fast);
    const double e2 = std::abs(brute_force_nonlinear(a, a, x1, x2, 2000) - fast);
    const double e3 = std::abs(brute_force_nonlinear(a, a, x1, x2, 4000) - fast);
    const double order = std::log2(e2 / e3);
    MESSAGE("observed order " << std::log2(e1 / e2) << ", " << order);
    CHECK(e3 < e2);
    CHECK(order >= 1.0);
    CHECK_THROWS_AS(brute_force_nonlinear(a, a, x1, x2, 999), InvalidArgument);
}
