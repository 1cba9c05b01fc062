#include "flproj/errors.hpp"

namespace flproj {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_bandwidth: return "invalid-bandwidth";
    case Errc::config_error: return "config-error";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::underdetermined_grid: return "underdetermined-grid";
    case Errc::sparse_period: return "sparse-period";
    case Errc::io_error: return "io-error";
    case Errc::ill_conditioned_covariates: return "ill-conditioned-covariates";
    case Errc::degenerate_cutoff: return "degenerate-cutoff";
    case Errc::degenerate_gap: return "degenerate-gap";
    case Errc::degenerate_variance: return "degenerate-variance";
    case Errc::weak_instrument: return "weak-instrument";
    case Errc::singular_structure: return "singular-structure";
    case Errc::identification_failure: return "identification-failure";
    case Errc::replication_failure: return "replication-failure";
    case Errc::internal_error: return "internal-error";
  }
  return "internal-error";
}

int errc_exit_code(Errc c) {
  switch (c) {
    case Errc::invalid_argument:
    case Errc::invalid_bandwidth:
    case Errc::config_error:
      return 2;
    case Errc::dimension_mismatch:
    case Errc::insufficient_data:
    case Errc::underdetermined_grid:
    case Errc::sparse_period:
    case Errc::io_error:
      return 3;
    default:
      return 4;
  }
}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace flproj
