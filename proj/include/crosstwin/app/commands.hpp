#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "crosstwin/app/run_config.hpp"

namespace crosstwin::app {

// Each command returns a process exit status; configuration problems are
// thrown as ConfigError for the caller to report.

int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_evaluate(const RunConfig& config, const std::string& checkpoint_path, std::ostream& out);
int cmd_baseline(const RunConfig& config, std::ostream& out);

struct KincheckReport {
  std::string chain;
  std::size_t samples = 0;
  double max_error = 0.0;
  bool planar_rows_ok = true;  // third row of the planar Jacobian is (1,1,1)
  bool pass = false;
};

/// Finite-difference Jacobian check over random joint vectors.
KincheckReport kincheck(const std::string& chain_name, std::uint64_t seed, std::size_t samples = 200);
int cmd_kincheck(const std::string& chain_name, std::uint64_t seed, std::ostream& out);

}  // namespace crosstwin::app
