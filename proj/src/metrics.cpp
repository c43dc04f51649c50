#include "qnd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qnd/error.hpp"
#include "qnd/one_photon.hpp"
#include "qnd/quadrature.hpp"

namespace qnd {

namespace {

constexpr int kBracketExpansions = 8;
constexpr int kMaxBisections = 200;
constexpr double kShapeTail = 80.0;

void check_duration(double d, const char *what)
{
    if (!std::isfinite(d) || d <= 0.0)
        throw InvalidArgument(std::string(what) + " must be positive and finite");
}

PulseSpec make_pulse(Shape shape, double d)
{
    return shape == Shape::Gaussian ? gaussian_pulse(d) : rectangular_pulse(d);
}

} // namespace

QndMetrics qnd_metrics(double d_signal, double d_ancilla, const MetricsOptions &opt)
{
    check_duration(d_signal, "signal duration");
    check_duration(d_ancilla, "ancilla duration");
    const PulseSpec signal = make_pulse(opt.shape, d_signal);
    const PulseSpec ancilla = make_pulse(opt.shape, d_ancilla);

    TwoPhotonOptions tp;
    tp.tolerance = opt.tol.two_d;
    tp.threads = opt.threads;
    const Grid grid2 = opt.grid ? *opt.grid : default_grid(signal, ancilla);
    const auto two = two_photon_probabilities(ancilla, signal, grid2, tp);
    const Grid grid1 = opt.grid ? *opt.grid : default_grid(ancilla);
    const auto one = one_photon_output(ancilla, grid1, opt.tol.one_d);

    QndMetrics m;
    m.d_signal = d_signal;
    m.d_ancilla = d_ancilla;
    m.p_suc = two.prob(kRR) + two.prob(kRL);
    m.p1R_ancilla = one.p_R;
    m.eqnd = m.p_suc / (m.p1R_ancilla + m.p_suc);
    m.error = std::max(two.error, one.error);
    return m;
}

std::string to_string(SweepMode mode)
{
    return mode == SweepMode::Symmetric ? "symmetric" : "asymmetric";
}

SweepMode parse_sweep_mode(const std::string &name)
{
    if (name == "symmetric")
        return SweepMode::Symmetric;
    if (name == "asymmetric")
        return SweepMode::Asymmetric;
    throw InvalidArgument("unknown sweep mode '" + name + "'");
}

DurationResult find_duration_for_success(double target, const DurationSearch &search,
                                         const MetricsOptions &opt)
{
    if (!std::isfinite(target) || target <= 0.0 || target >= 1.0)
        throw InvalidArgument("target success probability must lie in (0, 1)");
    if (search.mode == SweepMode::Asymmetric)
        check_duration(search.d_ancilla, "ancilla duration");
    check_duration(search.lo, "bracket lower end");
    check_duration(search.hi, "bracket upper end");
    if (!(search.lo < search.hi))
        throw InvalidArgument("bracket requires lo < hi");

    DurationResult res;
    auto eval = [&](double d) {
        ++res.iterations;
        return qnd_metrics(d, search.mode == SweepMode::Symmetric ? d : search.d_ancilla, opt);
    };
    auto done = [&](const QndMetrics &m) { return std::abs(m.p_suc - target) < opt.tol.root; };
    auto accept = [&](double d, const QndMetrics &m) {
        res.d = d;
        res.metrics = m;
        return res;
    };

    double lo = search.lo;
    double hi = search.hi;
    QndMetrics m_lo = eval(lo);
    for (int k = 0; m_lo.p_suc < target && k < kBracketExpansions; ++k)
        m_lo = eval(lo *= 0.5);
    QndMetrics m_hi = eval(hi);
    for (int k = 0; m_hi.p_suc > target && k < kBracketExpansions; ++k)
        m_hi = eval(hi *= 2.0);
    if (done(m_lo))
        return accept(lo, m_lo);
    if (done(m_hi))
        return accept(hi, m_hi);
    if (m_lo.p_suc < target || m_hi.p_suc > target) {
        const double miss = std::min(std::abs(m_lo.p_suc - target), std::abs(m_hi.p_suc - target));
        throw ConvergenceError("no duration bracket reaches the target success probability", miss,
                               opt.tol.root);
    }

    for (int k = 0; k < kMaxBisections; ++k) {
        const double mid = 0.5 * (lo + hi);
        const QndMetrics m = eval(mid);
        if (done(m))
            return accept(mid, m);
        if (m.p_suc > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-13 * hi)
            throw ConvergenceError("bisection stalled", std::abs(m.p_suc - target), opt.tol.root);
    }
    throw ConvergenceError("bisection iteration limit", std::abs(m_lo.p_suc - target),
                           opt.tol.root);
}

QndMetrics weak_light_metrics(const QndMetrics &base, const WeakLightSpec &weak)
{
    const double w = weak.one_photon_weight;
    if (!std::isfinite(w) || w < 0.0 || w > 1.0)
        throw InvalidArgument("one-photon weight must lie in [0, 1]");
    QndMetrics m = base;
    m.p_suc = w * base.p_suc;
    m.p1R_ancilla = w * base.p1R_ancilla;
    m.eqnd = w > 0.0 ? base.eqnd : std::numeric_limits<double>::quiet_NaN();
    return m;
}

std::vector<QndMetrics> sweep(SweepMode mode, const std::vector<double> &d_values,
                              std::optional<double> d_ancilla_fixed, const MetricsOptions &opt)
{
    for (double d : d_values)
        check_duration(d, "sweep duration");
    const double d_anc = d_ancilla_fixed.value_or(kDefaultAncilla);
    std::vector<QndMetrics> out;
    out.reserve(d_values.size());
    for (double d : d_values)
        out.push_back(qnd_metrics(d, mode == SweepMode::Symmetric ? d : d_anc, opt));
    return out;
}

ConditionalShape conditional_signal_shape(double d_signal, double d_ancilla, double x_detect,
                                          const ShapeOptions &opt)
{
    check_duration(d_signal, "signal duration");
    check_duration(d_ancilla, "ancilla duration");
    if (!std::isfinite(x_detect))
        throw InvalidArgument("detection coordinate must be finite");
    if (!(opt.spacing > 0.0))
        throw InvalidArgument("shape spacing must be positive");
    const PulseSpec signal = make_pulse(opt.shape, d_signal);
    const PulseSpec ancilla = make_pulse(opt.shape, d_ancilla);
    const Channel ch{Side::R, opt.signal_side};

    auto slice = [&](double delta) {
        return two_photon_amplitude(ancilla, signal, ch, x_detect, x_detect + delta);
    };

    const double lo = std::min(x_detect, signal.support_lo()) - kShapeTail - x_detect;
    const double hi = std::max(x_detect, signal.support_hi()) + kShapeTail - x_detect;
    std::vector<double> breaks{lo, 0.0, hi};
    for (double e : signal.edges())
        breaks.push_back(e - x_detect);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return b - a <= 1e-9; }),
                 breaks.end());
    const std::vector<double> spacing(breaks.size() - 1, opt.spacing);
    const Mesh mesh = Mesh::from_segments(breaks, spacing);
    std::vector<double> sq(mesh.size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
        const double v = slice(mesh.node(i));
        sq[i] = v * v;
    }
    const double norm2 = mesh.integrate(sq);
    if (!(norm2 >= 1e-12))
        throw InvalidArgument("heralded amplitude vanishes at this detection coordinate");

    ConditionalShape out;
    out.aleph = 1.0 / norm2;
    if (opt.delta.empty()) {
        for (int k = -200; k <= 200; ++k)
            out.delta.push_back(0.1 * k);
    } else {
        out.delta = opt.delta;
    }
    const double scale = std::sqrt(out.aleph);
    for (double dl : out.delta)
        out.amplitude.push_back(scale * slice(dl));
    return out;
}

double fit_decay_rate(const std::vector<double> &delta, const std::vector<double> &amplitude,
                      double rel_floor)
{
    if (delta.size() != amplitude.size())
        throw InvalidArgument("fit_decay_rate: size mismatch");
    double peak = 0.0;
    for (double a : amplitude)
        peak = std::max(peak, std::abs(a));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        const double a = std::abs(amplitude[i]);
        if (a < rel_floor * peak || a == 0.0)
            continue;
        const double x = std::abs(delta[i]);
        const double y = std::log(a);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double den = static_cast<double>(n) * sxx - sx * sx;
    if (n < 2 || !(std::abs(den) > 0.0))
        throw InvalidArgument("fit_decay_rate: not enough usable samples");
    return -(static_cast<double>(n) * sxy - sx * sy) / den;
}

ScenarioResult physical_scenario(const PhysicalScenario &s, const MetricsOptions &opt)
{
    for (double v : {s.g_ghz, s.kappa_ghz, s.pulse_seconds})
        if (!std::isfinite(v) || v <= 0.0)
            throw InvalidArgument("scenario rates and pulse duration must be positive");
    const CavityParams cav{s.g_ghz, s.kappa_ghz};
    ScenarioResult r;
    r.gamma_ghz = cav.gamma();
    r.d = r.gamma_ghz * 1e9 * s.pulse_seconds;
    r.bad_cavity = cav.bad_cavity();
    r.convention = "d = Gamma[GHz] * 1e9 * pulse[s]; rates taken as given (no 2*pi)";
    r.metrics = qnd_metrics(r.d, r.d, opt);
    return r;
}

} // namespace qnd
