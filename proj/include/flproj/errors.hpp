#pragma once

#include <stdexcept>
#include <string>

namespace flproj {

// Failure taxonomy. Exit-code classes: usage (2), data (3), numerical (4).
enum class Errc {
  invalid_argument,
  invalid_bandwidth,
  config_error,
  dimension_mismatch,
  insufficient_data,
  underdetermined_grid,
  sparse_period,
  io_error,
  ill_conditioned_covariates,
  degenerate_cutoff,
  degenerate_gap,
  degenerate_variance,
  weak_instrument,
  singular_structure,
  identification_failure,
  replication_failure,
  internal_error,
};

const char* errc_name(Errc c);   // stable kebab-case identifier
int errc_exit_code(Errc c);      // 2, 3 or 4

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Errc code() const { return code_; }
  const char* name() const { return errc_name(code_); }
  int exit_code() const { return errc_exit_code(code_); }

private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

inline void require(bool cond, Errc code, const std::string& message) {
  if (!cond) raise(code, message);
}

}  // namespace flproj
