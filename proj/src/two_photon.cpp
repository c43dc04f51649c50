#include "qnd/two_photon.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "qnd/error.hpp"
#include "qnd/one_photon.hpp"
#include "qnd/quadrature.hpp"

namespace qnd {

namespace {

// e^{-|Δ|/2} below this is dropped from a row (|Δ| > ~80).
constexpr double kKernelCut = 1e-17;
constexpr std::size_t kTileRows = 64;
constexpr int kMaxRefinements = 1;

struct Factors {
    std::array<std::vector<double>, 2> a;
    std::array<std::vector<double>, 2> b;
    std::vector<double> abs_product;
};

Factors sample_factors(const Mesh &mesh, const PulseSpec &s1, const PulseSpec &s2)
{
    const std::size_t n = mesh.size();
    Factors f;
    for (auto *v : {&f.a[0], &f.a[1], &f.b[0], &f.b[1], &f.abs_product})
        v->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mesh.node(i);
        const double u = absorbed_amplitude(s1, x);
        const double v = absorbed_amplitude(s2, x);
        f.a[0][i] = u;
        f.a[1][i] = pulse_amplitude(s1, x) + u;
        f.b[0][i] = v;
        f.b[1][i] = pulse_amplitude(s2, x) + v;
        f.abs_product[i] = u * v;
    }
    return f;
}

struct RowIntegrals {
    std::vector<double> nn;
    std::array<std::vector<double>, 2> nb;
};

// For every x1 = x_i: ∫N², ∫N·b_L, ∫N·b_R over x2, split at the diagonal.
RowIntegrals row_integrals(const Mesh &mesh, const Factors &f, unsigned threads)
{
    const std::size_t n = mesh.size();
    const auto w = mesh.weights();
    std::vector<double> step(n > 0 ? n - 1 : 0);
    for (std::size_t j = 0; j + 1 < n; ++j)
        step[j] = std::exp(-0.5 * (mesh.node(j + 1) - mesh.node(j)));

    RowIntegrals out;
    out.nn.assign(n, 0.0);
    out.nb[0].assign(n, 0.0);
    out.nb[1].assign(n, 0.0);

    const auto &P = f.abs_product;
    const auto &bl = f.b[0];
    const auto &br = f.b[1];

    auto do_row = [&](std::size_t i, std::vector<double> &row) {
        std::size_t lo = i;
        std::size_t hi = i;
        row[i] = -P[i];
        double r = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            r *= step[j - 1];
            row[j] = -r * P[j];
            hi = j;
            if (r < kKernelCut && j >= i + 3)
                break;
        }
        r = 1.0;
        const double pi = P[i];
        for (std::size_t j = i; j-- > 0;) {
            r *= step[j];
            row[j] = -r * pi;
            lo = j;
            if (r < kKernelCut && j + 3 <= i)
                break;
        }
        double snn = 0.0, sl = 0.0, sr = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            const double v = w[j] * row[j];
            snn += v * row[j];
            sl += v * bl[j];
            sr += v * br[j];
        }
        const auto c = mesh.split_correction(i);
        for (std::size_t k = 0; k < c.count; ++k) {
            const std::size_t j = c.first + k;
            const double v = c.delta[k] * row[j];
            snn += v * row[j];
            sl += v * bl[j];
            sr += v * br[j];
        }
        out.nn[i] = snn;
        out.nb[0][i] = sl;
        out.nb[1][i] = sr;
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t tiles = (n + kTileRows - 1) / kTileRows;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, tiles));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        std::vector<double> row(n, 0.0);
        for (std::size_t t; (t = next.fetch_add(1)) < tiles;) {
            const std::size_t end = std::min(n, (t + 1) * kTileRows);
            for (std::size_t i = t * kTileRows; i < end; ++i)
                do_row(i, row);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }
    return out;
}

std::array<double, 4> channel_probabilities(const Mesh &mesh, const Factors &f,
                                            bool include_nonlinear, unsigned threads)
{
    std::array<double, 2> pa{}, pb{};
    for (int s = 0; s < 2; ++s) {
        std::vector<double> sq(mesh.size());
        for (std::size_t i = 0; i < sq.size(); ++i)
            sq[i] = f.a[s][i] * f.a[s][i];
        pa[s] = mesh.integrate(sq);
        for (std::size_t i = 0; i < sq.size(); ++i)
            sq[i] = f.b[s][i] * f.b[s][i];
        pb[s] = mesh.integrate(sq);
    }
    std::array<double, 4> p{};
    for (const auto ch : kChannels)
        p[ch.index()] = pa[static_cast<int>(ch.side1)] * pb[static_cast<int>(ch.side2)];
    if (!include_nonlinear)
        return p;

    const auto rows = row_integrals(mesh, f, threads);
    const double nn = mesh.integrate(rows.nn);
    for (const auto ch : kChannels) {
        const auto &a = f.a[static_cast<int>(ch.side1)];
        const auto &nb = rows.nb[static_cast<int>(ch.side2)];
        std::vector<double> cross(mesh.size());
        for (std::size_t i = 0; i < cross.size(); ++i)
            cross[i] = a[i] * nb[i];
        p[ch.index()] += 2.0 * mesh.integrate(cross) + nn;
    }
    return p;
}

} // namespace

std::size_t Channel::index() const
{
    return 2 * static_cast<std::size_t>(side1) + static_cast<std::size_t>(side2);
}

std::string Channel::name() const
{
    std::string s;
    s += side1 == Side::L ? 'L' : 'R';
    s += side2 == Side::L ? 'L' : 'R';
    return s;
}

double nonlinear_amplitude(const PulseSpec &spec1, const PulseSpec &spec2, double x1, double x2)
{
    const double m = std::max(x1, x2);
    return -std::exp(-0.5 * std::abs(x1 - x2)) * absorbed_amplitude(spec1, m) *
           absorbed_amplitude(spec2, m);
}

double one_photon_amplitude(const PulseSpec &spec, Side side, double x)
{
    const double abs = absorbed_amplitude(spec, x);
    return side == Side::L ? abs : pulse_amplitude(spec, x) + abs;
}

double two_photon_amplitude(const PulseSpec &spec1, const PulseSpec &spec2, Channel ch, double x1,
                            double x2, bool include_nonlinear)
{
    double v = one_photon_amplitude(spec1, ch.side1, x1) * one_photon_amplitude(spec2, ch.side2, x2);
    if (include_nonlinear)
        v += nonlinear_amplitude(spec1, spec2, x1, x2);
    return v;
}

double TwoPhotonResult::amplitude(Channel ch, std::size_t i, std::size_t j) const
{
    double v = a[static_cast<int>(ch.side1)][i] * b[static_cast<int>(ch.side2)][j];
    if (include_nonlinear)
        v -= std::exp(-0.5 * std::abs(x[i] - x[j])) * abs_product[std::max(i, j)];
    return v;
}

TwoPhotonResult two_photon_probabilities(const PulseSpec &spec1, const PulseSpec &spec2,
                                         const Grid &grid, const TwoPhotonOptions &opt)
{
    spec1.validate();
    spec2.validate();
    const PulseSpec pulses[] = {spec1, spec2};
    TwoPhotonResult res;
    res.include_nonlinear = opt.include_nonlinear;
    double scale = 1.0;
    for (int level = 0;; ++level, scale *= 0.5) {
        const Mesh fine = Mesh::build(grid, pulses, scale);
        const Mesh coarse = Mesh::build(grid, pulses, 2.0 * scale);
        auto f = sample_factors(fine, spec1, spec2);
        const auto p = channel_probabilities(fine, f, opt.include_nonlinear, opt.threads);
        const auto q = channel_probabilities(coarse, sample_factors(coarse, spec1, spec2),
                                             opt.include_nonlinear, opt.threads);
        res.p = p;
        res.error = 0.0;
        for (std::size_t k = 0; k < 4; ++k)
            res.error = std::max(res.error, std::abs(p[k] - q[k]) / 15.0);
        if (res.error <= opt.tolerance) {
            res.x.assign(fine.nodes().begin(), fine.nodes().end());
            res.a = std::move(f.a);
            res.b = std::move(f.b);
            res.abs_product = std::move(f.abs_product);
            return res;
        }
        if (level == kMaxRefinements)
            throw ConvergenceError("two-photon probabilities not converged", res.error,
                                   opt.tolerance);
    }
}

TwoPhotonResult two_photon_probabilities(const PulseSpec &spec1, const PulseSpec &spec2,
                                         const TwoPhotonOptions &opt)
{
    return two_photon_probabilities(spec1, spec2, default_grid(spec1, spec2), opt);
}

} // namespace qnd
