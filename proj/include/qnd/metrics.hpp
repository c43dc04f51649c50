#ifndef QND_METRICS_HPP
#define QND_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "qnd/pulses.hpp"
#include "qnd/two_photon.hpp"

namespace qnd {

struct Tolerances {
    double one_d = 1e-8;
    double two_d = 1e-6;
    double root = 1e-4;
};

struct QndMetrics {
    double d_signal = 0.0;
    double d_ancilla = 0.0;
    double p_suc = 0.0;
    double eqnd = 0.0;
    double p1R_ancilla = 0.0;
    double error = 0.0; // largest quadrature error estimate behind the numbers
};

struct MetricsOptions {
    Shape shape = Shape::Gaussian;
    Tolerances tol{};
    std::optional<Grid> grid; // default_grid when empty
    unsigned threads = 0;
};

// Photon 1 = ancilla, photon 2 = signal.
// p_suc = P(R1,R2) + P(R1,L2); eqnd = p_suc / (p1R_ancilla + p_suc).
QndMetrics qnd_metrics(double d_signal, double d_ancilla, const MetricsOptions &opt = {});

enum class SweepMode { Symmetric, Asymmetric };

std::string to_string(SweepMode mode);
SweepMode parse_sweep_mode(const std::string &name);

inline constexpr double kDefaultAncilla = 40.0;

struct DurationSearch {
    SweepMode mode = SweepMode::Symmetric;
    double d_ancilla = kDefaultAncilla; // used in Asymmetric mode
    double lo = 5.0;
    double hi = 80.0;
};

struct DurationResult {
    double d = 0.0;
    QndMetrics metrics;
    int iterations = 0;
};

// Bisection on d for P_suc(d) = target, |P_suc - target| < opt.tol.root.
// P_suc falls with d; the bracket is widened by factors of two if needed.
DurationResult find_duration_for_success(double target, const DurationSearch &search = {},
                                         const MetricsOptions &opt = {});

struct WeakLightSpec {
    double one_photon_weight = 1.0;
};

// Scales p_suc and p1R by w. eqnd is unchanged; NaN when w = 0.
QndMetrics weak_light_metrics(const QndMetrics &base, const WeakLightSpec &weak);

std::vector<QndMetrics> sweep(SweepMode mode, const std::vector<double> &d_values,
                              std::optional<double> d_ancilla_fixed = std::nullopt,
                              const MetricsOptions &opt = {});

struct ShapeOptions {
    Shape shape = Shape::Rectangular;
    Side signal_side = Side::L;
    std::vector<double> delta; // sample points; default -20..20 step 0.1
    double spacing = 0.01;     // normalization mesh
};

struct ConditionalShape {
    std::vector<double> delta;
    std::vector<double> amplitude; // unit norm in Δ
    double aleph = 0.0;            // 1/∫|slice|²
};

// Heralded amplitude Ψ^{R,side}(x_detect, x_detect + Δ), normalized in Δ.
// Throws InvalidArgument when the slice carries no weight.
ConditionalShape conditional_signal_shape(double d_signal, double d_ancilla, double x_detect,
                                          const ShapeOptions &opt = {});

// Least-squares slope of -ln|a| against |Δ| over samples with
// |a| >= rel_floor·max|a|.
double fit_decay_rate(const std::vector<double> &delta, const std::vector<double> &amplitude,
                      double rel_floor = 1e-3);

struct PhysicalScenario {
    double g_ghz = 132.0;
    double kappa_ghz = 528.0;
    double pulse_seconds = 500e-12;
};

struct ScenarioResult {
    double gamma_ghz = 0.0;
    double d = 0.0;
    bool bad_cavity = true;
    std::string convention;
    QndMetrics metrics;
};

// Γ = g²/κ; d = Γ[GHz]·1e9·pulse_seconds; symmetric metrics at d.
ScenarioResult physical_scenario(const PhysicalScenario &s, const MetricsOptions &opt = {});

} // namespace qnd

#endif // QND_METRICS_HPP
