#ifndef QND_ERROR_HPP
#define QND_ERROR_HPP

#include <sstream>
#include <stdexcept>
#include <string>

namespace qnd {

// Raised for out-of-domain inputs (non-positive durations, bad grids, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a quadrature, integrator or root search misses its tolerance.
// Carries the estimate that was actually reached so callers can report it.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string &what, double achieved, double requested)
        : std::runtime_error(format(what, achieved, requested)),
          achieved_(achieved),
          requested_(requested)
    {
    }

    double achieved() const noexcept { return achieved_; }
    double requested() const noexcept { return requested_; }

private:
    static std::string format(const std::string &what, double achieved, double requested)
    {
        std::ostringstream os;
        os << what << " (achieved " << achieved << ", requested " << requested << ")";
        return os.str();
    }

    double achieved_;
    double requested_;
};

} // namespace qnd

#endif // QND_ERROR_HPP
