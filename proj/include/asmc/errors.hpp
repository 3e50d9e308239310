#pragma once

#include <stdexcept>
#include <string>

namespace asmc {

// Error taxonomy; the CLI maps these onto its exit codes.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration, arguments, or missing model ingredients (exit code 2).
struct config_error : error {
  using error::error;
};

// A run aborted mid-flight: collapsed weights, non-finite statistics and the
// like. The message names the generation where it happened (exit code 3).
struct run_error : error {
  using error::error;
};

// An inconsistent model definition, e.g. a kernel matrix that is not
// row-stochastic or a summary value escaping its declared box (exit code 4).
struct model_error : error {
  using error::error;
};

}  // namespace asmc
