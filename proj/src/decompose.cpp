#include "flagdecomp/decompose.hpp"

namespace flagdecomp {

void SolverConfig::validate() const {
    if (max_iterations < 1) {
        throw InvalidArgument("solver: max_iterations must be at least 1");
    }
    if (!(relative_tolerance > 0.0) || !(weight_floor > 0.0)) {
        throw InvalidArgument("solver: tolerances must be positive");
    }
}

std::string to_string(SolverMode mode) {
    return mode == SolverMode::svd ? "svd" : "irls_svd";
}

SolverMode parse_solver_mode(const std::string& text) {
    if (text == "svd") return SolverMode::svd;
    if (text == "irls_svd") return SolverMode::irls_svd;
    throw InvalidArgument("unknown solver mode '" + text + "'");
}

std::string to_string(RecoveryMethod method) {
    switch (method) {
        case RecoveryMethod::fd: return "fd";
        case RecoveryMethod::rfd: return "rfd";
        case RecoveryMethod::svd: return "svd";
        case RecoveryMethod::irls_svd: return "irls_svd";
    }
    return "?";
}

RecoveryMethod parse_recovery_method(const std::string& text) {
    if (text == "fd") return RecoveryMethod::fd;
    if (text == "rfd") return RecoveryMethod::rfd;
    if (text == "svd") return RecoveryMethod::svd;
    if (text == "irls_svd") return RecoveryMethod::irls_svd;
    throw InvalidArgument("unknown recovery method '" + text + "'");
}

}  // namespace flagdecomp
