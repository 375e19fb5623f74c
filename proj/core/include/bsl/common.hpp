#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace bsl {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline const cplx kI{0.0, 1.0};

enum class ErrorKind {
    InvalidArgument,
    Overflow,
    QuadratureFailed,
    NoDeltaFound,
    PhaseConditionViolated,
    NonzeroAverage,
    DegreeOverflow,
    SingularInput,
    NewtonDiverged,
    DegenerateHessian,
    NonEllipticHessian,
    NoConvergence,
    InversionFailed,
    UnmatchedEigenvalue,
    NonClosedContour,
    ParseError,
    ConfigError,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Integer power by repeated squaring (std::pow(0, 0) is NaN for complex).
template <class T>
T ipow(T x, int n) {
    T r(1);
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

// Semiclassical parameter, 0 < hbar <= 1.
struct PlanckParameter {
    double hbar;
    explicit PlanckParameter(double h);
    operator double() const { return hbar; }
};

// Number of retained basis states e_0 .. e_{n_max-1}.
struct BasisTruncation {
    int n_max;
    explicit BasisTruncation(int n);
    operator int() const { return n_max; }
};

// Worker count for parallel grid loops. Reads BSL_THREADS, defaults to the
// hardware concurrency.
unsigned worker_count();

}  // namespace bsl
