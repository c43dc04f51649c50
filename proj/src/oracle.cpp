#include "qnd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qnd/error.hpp"

namespace qnd {

namespace {

using cplx = std::complex<double>;

constexpr double kBruteWidths = 6.0;
constexpr std::size_t kNormCheckEvery = 1024;

struct KGrid {
    std::vector<double> k;
    std::vector<double> w;
};

KGrid make_k_grid(double core, double h0, double growth, double K)
{
    std::vector<double> pos;
    core = std::min(core, K);
    const auto n = static_cast<std::size_t>(std::ceil(core / h0 - 1e-9));
    for (std::size_t i = 0; i <= n; ++i)
        pos.push_back(core * static_cast<double>(i) / static_cast<double>(n));
    double h = core / static_cast<double>(n);
    while (pos.back() < K) {
        h *= growth;
        pos.push_back(pos.back() + h);
    }
    KGrid g;
    for (std::size_t i = pos.size(); i-- > 1;)
        g.k.push_back(-pos[i]);
    g.k.insert(g.k.end(), pos.begin(), pos.end());
    g.w.assign(g.k.size(), 0.0);
    for (std::size_t i = 0; i + 1 < g.k.size(); ++i) {
        const double dk = g.k[i + 1] - g.k[i];
        g.w[i] += 0.5 * dk;
        g.w[i + 1] += 0.5 * dk;
    }
    return g;
}

// Even mode ẽ_m = √w_m·(ψ+φ)/√2 couples to the cavity; the odd mode is free.
struct EvenState {
    cplx phi;
    cplx lam;
    std::vector<cplx> e;
};

struct Run {
    EvenState s;
    double drift = 0.0;
};

Run integrate_rk4(const CavityParams &p, const std::vector<double> &k,
                  const std::vector<double> &sw, const EvenState &init, double t_final,
                  std::size_t steps, double odd_norm, double norm_tol)
{
    const std::size_t M = k.size();
    const double G = std::sqrt(2.0 * p.kappa / std::numbers::pi);
    const double dt = t_final / static_cast<double>(steps);
    const cplx I(0.0, 1.0);

    EvenState s = init;
    std::vector<cplx> k1(M), k2(M), k3(M), k4(M), tmp(M);
    auto rhs = [&](cplx phi, cplx lam, const std::vector<cplx> &e, cplx &dphi, cplx &dlam,
                   std::vector<cplx> &de) {
        cplx proj = 0.0;
        for (std::size_t m = 0; m < M; ++m)
            proj += sw[m] * e[m];
        dphi = -I * p.g * lam;
        dlam = -I * p.g * phi - I * G * proj;
        const cplx drive = -I * G * lam;
        for (std::size_t m = 0; m < M; ++m)
            de[m] = -I * k[m] * e[m] + drive * sw[m];
    };
    auto norm_of = [&](const EvenState &st) {
        double n = std::norm(st.phi) + std::norm(st.lam) + odd_norm;
        for (const auto &v : st.e)
            n += std::norm(v);
        return n;
    };

    const double norm0 = norm_of(s);
    Run run;
    for (std::size_t step = 0; step < steps; ++step) {
        cplx dp1, dl1, dp2, dl2, dp3, dl3, dp4, dl4;
        rhs(s.phi, s.lam, s.e, dp1, dl1, k1);
        for (std::size_t m = 0; m < M; ++m)
            tmp[m] = s.e[m] + 0.5 * dt * k1[m];
        rhs(s.phi + 0.5 * dt * dp1, s.lam + 0.5 * dt * dl1, tmp, dp2, dl2, k2);
        for (std::size_t m = 0; m < M; ++m)
            tmp[m] = s.e[m] + 0.5 * dt * k2[m];
        rhs(s.phi + 0.5 * dt * dp2, s.lam + 0.5 * dt * dl2, tmp, dp3, dl3, k3);
        for (std::size_t m = 0; m < M; ++m)
            tmp[m] = s.e[m] + dt * k3[m];
        rhs(s.phi + dt * dp3, s.lam + dt * dl3, tmp, dp4, dl4, k4);
        s.phi += dt / 6.0 * (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4);
        s.lam += dt / 6.0 * (dl1 + 2.0 * dl2 + 2.0 * dl3 + dl4);
        for (std::size_t m = 0; m < M; ++m)
            s.e[m] += dt / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        if ((step + 1) % kNormCheckEvery == 0 || step + 1 == steps) {
            run.drift = std::max(run.drift, std::abs(norm_of(s) - norm0));
            if (run.drift > norm_tol)
                throw ConvergenceError("full-model norm drift", run.drift, norm_tol);
        }
    }
    run.s = std::move(s);
    return run;
}

double brute_abs(const PulseSpec &spec, double x, std::size_t n)
{
    const double hi = spec.shape == Shape::Gaussian ? spec.center + kBruteWidths * spec.duration
                                                    : spec.support_hi();
    if (x >= hi)
        return 0.0;
    const double dx = (hi - x) / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xp = x + (static_cast<double>(i) + 0.5) * dx;
        sum += std::exp(-0.5 * (xp - x)) * pulse_amplitude(spec, xp);
    }
    return -0.5 * sum * dx;
}

double upper_limit(const PulseSpec &spec)
{
    return spec.shape == Shape::Gaussian ? spec.center + kBruteWidths * spec.duration
                                         : spec.support_hi();
}

} // namespace

double FullModelState::norm() const
{
    double n = std::norm(excited_amp) + std::norm(cavity_amp);
    for (std::size_t m = 0; m < k_grid.size(); ++m)
        n += k_weight[m] * (std::norm(field_L[m]) + std::norm(field_R[m]));
    return n;
}

double FullModelState::p_L() const
{
    double p = 0.0;
    for (std::size_t m = 0; m < k_grid.size(); ++m)
        p += k_weight[m] * std::norm(field_L[m]);
    return p;
}

double FullModelState::p_R() const
{
    double p = 0.0;
    for (std::size_t m = 0; m < k_grid.size(); ++m)
        p += k_weight[m] * std::norm(field_R[m]);
    return p;
}

cplx FullModelState::output_amplitude(Side side, double x) const
{
    const auto &f = side == Side::L ? field_L : field_R;
    cplx sum = 0.0;
    for (std::size_t m = 0; m < k_grid.size(); ++m)
        sum += k_weight[m] * f[m] * std::exp(cplx(0.0, k_grid[m] * (x + r0 + t_final)));
    return -sum / std::sqrt(2.0 * std::numbers::pi);
}

cplx pulse_spectrum(const PulseSpec &spec, double k)
{
    spec.validate();
    const double d = spec.duration;
    const cplx shift = std::exp(cplx(0.0, -k * spec.center));
    if (spec.shape == Shape::Gaussian) {
        const double norm = std::sqrt(2.0 / (d * std::sqrt(std::numbers::pi)));
        return shift * norm * 0.5 * d * std::exp(-k * k * d * d / 8.0);
    }
    const double base = 1.0 / std::sqrt(2.0 * std::numbers::pi * d);
    const double u = 0.5 * k * d;
    const double sinc = std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
    return shift * base * d * sinc;
}

cplx full_model_transmission(const CavityParams &params, double k)
{
    params.validate();
    if (k == 0.0)
        return 0.0;
    const double kap = params.kappa;
    const double g2 = params.g * params.g;
    return -2.0 * kap / cplx(2.0 * kap, -k + g2 / k);
}

FullModelState full_model_propagate(const CavityParams &params, const PulseSpec &spec,
                                    const FullModelOptions &opt)
{
    params.validate();
    spec.validate();
    const double d = spec.duration;
    const double k_needed = std::max(20.0 / d, 10.0 * params.kappa);
    const double K = opt.k_cutoff > 0.0 ? opt.k_cutoff : k_needed;
    const double r0 = -(2.5 * d + 10.0);
    const double t_final = opt.t_final > 0.0 ? opt.t_final : 2.0 * std::abs(r0) + 40.0;
    // The discrete k-grid makes the field periodic in x with period 2π/Δk;
    // the period must cover the whole propagation window.
    const double h_box = std::numbers::pi / (t_final + std::abs(r0));
    const double h0 = opt.core_spacing > 0.0 ? opt.core_spacing : std::min(0.1 / d, h_box);
    if (K < k_needed * (1.0 - 1e-12) || h0 > 0.1 / d * (1.0 + 1e-12))
        throw InvalidArgument("k-grid does not resolve the pulse spectrum or cavity bandwidth");
    if (!(opt.growth >= 1.0) || !(opt.dt_factor > 0.0) || opt.core_extent <= 0.0)
        throw InvalidArgument("invalid full-model discretization options");

    const KGrid grid = make_k_grid(opt.core_extent / d, h0, opt.growth, K);
    const std::size_t M = grid.k.size();
    std::vector<double> sw(M);
    for (std::size_t m = 0; m < M; ++m)
        sw[m] = std::sqrt(grid.w[m]);

    FullModelState out;
    out.r0 = r0;
    out.t_final = t_final;

    EvenState init;
    init.phi = 0.0;
    init.lam = 0.0;
    init.e.resize(M);
    std::vector<cplx> odd0(M);
    double odd_norm = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        const cplx in = pulse_spectrum(spec, grid.k[m]) *
                        std::exp(cplx(0.0, -grid.k[m] * out.r0)) * sw[m];
        init.e[m] = in / std::sqrt(2.0);
        odd0[m] = in / std::sqrt(2.0);
        odd_norm += std::norm(odd0[m]);
    }

    const double max_k = std::max(std::abs(grid.k.front()), std::abs(grid.k.back()));
    auto steps = static_cast<std::size_t>(std::ceil(out.t_final * max_k / opt.dt_factor));

    auto observables = [&](const EvenState &s) {
        double pl = 0.0, pr = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const cplx o = odd0[m] * std::exp(cplx(0.0, -grid.k[m] * out.t_final));
            pl += 0.5 * std::norm(s.e[m] + o);
            pr += 0.5 * std::norm(s.e[m] - o);
        }
        return std::pair{pl, pr};
    };

    Run coarse = integrate_rk4(params, grid.k, sw, init, out.t_final, steps, odd_norm,
                               opt.norm_tolerance);
    auto prev = observables(coarse.s);
    Run fine;
    double err = 0.0;
    for (int h = 0;; ++h) {
        steps *= 2;
        fine = integrate_rk4(params, grid.k, sw, init, out.t_final, steps, odd_norm,
                             opt.norm_tolerance);
        const auto cur = observables(fine.s);
        err = std::max(std::abs(cur.first - prev.first), std::abs(cur.second - prev.second)) / 15.0;
        if (err <= opt.tolerance)
            break;
        if (h + 1 >= opt.max_halvings)
            throw ConvergenceError("full-model step halving did not converge", err,
                                   opt.tolerance);
        prev = cur;
    }

    out.excited_amp = fine.s.phi;
    out.cavity_amp = fine.s.lam;
    out.k_grid = grid.k;
    out.k_weight = grid.w;
    out.field_L.resize(M);
    out.field_R.resize(M);
    for (std::size_t m = 0; m < M; ++m) {
        const cplx o = odd0[m] * std::exp(cplx(0.0, -grid.k[m] * out.t_final));
        out.field_L[m] = (fine.s.e[m] + o) / (std::sqrt(2.0) * sw[m]);
        out.field_R[m] = (fine.s.e[m] - o) / (std::sqrt(2.0) * sw[m]);
    }
    out.dt = out.t_final / static_cast<double>(steps);
    out.step_error = err;
    out.norm_drift = std::max(coarse.drift, fine.drift);
    return out;
}

double brute_force_one_photon(const PulseSpec &spec, Side side, double x, std::size_t n)
{
    spec.validate();
    if (n < 1000)
        throw InvalidArgument("brute-force quadrature needs n >= 1000");
    const double abs = brute_abs(spec, x, n);
    return side == Side::L ? abs : pulse_amplitude(spec, x) + abs;
}

double brute_force_nonlinear(const PulseSpec &spec1, const PulseSpec &spec2, double x1, double x2,
                             std::size_t n)
{
    spec1.validate();
    spec2.validate();
    if (n < 1000)
        throw InvalidArgument("brute-force quadrature needs n >= 1000");
    const double m = std::max(x1, x2);
    const double hi1 = upper_limit(spec1);
    const double hi2 = upper_limit(spec2);
    if (m >= hi1 || m >= hi2)
        return 0.0;
    const double d1 = (hi1 - m) / static_cast<double>(n);
    const double d2 = (hi2 - m) / static_cast<double>(n);
    std::vector<double> f2(n);
    for (std::size_t j = 0; j < n; ++j)
        f2[j] = pulse_amplitude(spec2, m + (static_cast<double>(j) + 0.5) * d2);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x1p = m + (static_cast<double>(i) + 0.5) * d1;
        const double f1 = pulse_amplitude(spec1, x1p);
        if (f1 == 0.0)
            continue;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x2p = m + (static_cast<double>(j) + 0.5) * d2;
            row += std::exp(-0.5 * (x1p - x1) - 0.5 * (x2p - x2)) * f2[j];
        }
        sum += f1 * row;
    }
    return -0.25 * sum * d1 * d2;
}

double brute_force_two_photon(const PulseSpec &spec1, const PulseSpec &spec2, Channel ch,
                              double x1, double x2, std::size_t n, bool include_nonlinear)
{
    double v = brute_force_one_photon(spec1, ch.side1, x1, n) *
               brute_force_one_photon(spec2, ch.side2, x2, n);
    if (include_nonlinear)
        v += brute_force_nonlinear(spec1, spec2, x1, x2, n);
    return v;
}

} // namespace qnd
