#ifndef QND_TWO_PHOTON_HPP
#define QND_TWO_PHOTON_HPP

#include <array>
#include <string>
#include <vector>

#include "qnd/pulses.hpp"

namespace qnd {

// Photon 1 is the ancilla, photon 2 the signal.
enum class Side { L, R };

struct Channel {
    Side side1 = Side::L;
    Side side2 = Side::L;

    Channel swapped() const { return {side2, side1}; }
    std::size_t index() const;
    std::string name() const;
};

inline constexpr Channel kLL{Side::L, Side::L};
inline constexpr Channel kLR{Side::L, Side::R};
inline constexpr Channel kRL{Side::R, Side::L};
inline constexpr Channel kRR{Side::R, Side::R};
inline constexpr std::array<Channel, 4> kChannels{kLL, kLR, kRL, kRR};

// Nonlinear correction -e^{-|x1-x2|/2}·ψ_abs1(m)·ψ_abs2(m), m = max(x1, x2).
double nonlinear_amplitude(const PulseSpec &spec1, const PulseSpec &spec2, double x1, double x2);

// One-photon output on `side`: ψ_abs for L, Ψ_in + ψ_abs for R.
double one_photon_amplitude(const PulseSpec &spec, Side side, double x);

// Ψ_out^{jk}(x1, x2) = a_j(x1)·b_k(x2) + N(x1, x2).
double two_photon_amplitude(const PulseSpec &spec1, const PulseSpec &spec2, Channel ch, double x1,
                            double x2, bool include_nonlinear = true);

struct TwoPhotonOptions {
    bool include_nonlinear = true;
    double tolerance = 1e-6;
    unsigned threads = 0; // 0: hardware concurrency
};

struct TwoPhotonResult {
    std::vector<double> x;
    std::array<double, 4> p{}; // indexed by Channel::index()
    double error = 0.0;
    bool include_nonlinear = true;

    double prob(Channel ch) const { return p[ch.index()]; }
    double total() const { return p[0] + p[1] + p[2] + p[3]; }
    // Amplitude surface on the node grid, rebuilt from stored factors.
    double amplitude(Channel ch, std::size_t i, std::size_t j) const;

    std::array<std::vector<double>, 2> a; // photon 1, per side
    std::array<std::vector<double>, 2> b; // photon 2, per side
    std::vector<double> abs_product;      // ψ_abs1·ψ_abs2 at each node
};

// Channel probabilities on the mesh derived from `grid`, with a doubling
// check (one extra mesh halving allowed). Throws ConvergenceError when the
// estimate still exceeds the tolerance.
TwoPhotonResult two_photon_probabilities(const PulseSpec &spec1, const PulseSpec &spec2,
                                         const Grid &grid, const TwoPhotonOptions &opt = {});
TwoPhotonResult two_photon_probabilities(const PulseSpec &spec1, const PulseSpec &spec2,
                                         const TwoPhotonOptions &opt = {});

} // namespace qnd

#endif // QND_TWO_PHOTON_HPP
