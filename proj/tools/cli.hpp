#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qgauss/generator.hpp"
#include "qgauss/maps.hpp"

namespace qgauss::cli {

enum ExitCode : int { kOk = 0, kArgumentError = 2, kDataError = 3 };

enum class Format { csv, json };

/// Everything a subcommand needs; filled from flags, then validated before
/// any work starts.
struct RunConfig {
  std::string subcommand;
  double q_out = 1.0;
  MapConfig map;
  Seeds seeds;
  std::uint64_t uniform_seed = 1;
  std::uint64_t seed = 20240601;  ///< master seed for trials and null replicates
  Method method = Method::chaotic;
  std::size_t count = 10000;
  std::size_t burn_in = 0;
  std::size_t trials = 100;
  std::size_t n_null = 999;
  int jobs = 0;
  std::string output = "-";
  std::string input;
  Format format = Format::csv;
};

/// Runs the command line; never throws. Data goes to `out`, errors to `err`
/// as a JSON object. Returns one of ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads `xi,eta` rows written by `gen`. Throws DataError on malformed input.
std::vector<double> read_xi_column(const std::string& path);

}  // namespace qgauss::cli
