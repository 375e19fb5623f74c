#include "bsl/common.hpp"

#include <cstdlib>
#include <thread>

namespace bsl {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::QuadratureFailed: return "QuadratureFailed";
        case ErrorKind::NoDeltaFound: return "NoDeltaFound";
        case ErrorKind::PhaseConditionViolated: return "PhaseConditionViolated";
        case ErrorKind::NonzeroAverage: return "NonzeroAverage";
        case ErrorKind::DegreeOverflow: return "DegreeOverflow";
        case ErrorKind::SingularInput: return "SingularInput";
        case ErrorKind::NewtonDiverged: return "NewtonDiverged";
        case ErrorKind::DegenerateHessian: return "DegenerateHessian";
        case ErrorKind::NonEllipticHessian: return "NonEllipticHessian";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::InversionFailed: return "InversionFailed";
        case ErrorKind::UnmatchedEigenvalue: return "UnmatchedEigenvalue";
        case ErrorKind::NonClosedContour: return "NonClosedContour";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Error";
}

PlanckParameter::PlanckParameter(double h) : hbar(h) {
    if (!(h > 0.0) || h > 1.0)
        throw Error(ErrorKind::InvalidArgument, "hbar must lie in (0, 1], got " + std::to_string(h));
}

BasisTruncation::BasisTruncation(int n) : n_max(n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
}

unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("BSL_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return hw;
}

}  // namespace bsl
