#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dve/cases.hpp"
#include "dve/newton.hpp"

namespace dve {

/// Validated run description assembled from a config file and/or flags.
struct RunConfig {
  std::string case_name = "stress_free";  // named case; may carry ":<a>"
  std::string suite;                      // "convexity"
  std::vector<int> elements;  // statics mesh ladder (empty: case default)
  int nx = 64;
  int nt = 64;
  double t_final = -1.0;  // < 0: case default
  AuxParams aux;
  NewtonConfig newton;
  bool compare_primal = false;
  int samples = 100;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  void validate() const;  // throws ConfigError naming the field
};

/// Parse a flat key=value config file ('#' comments allowed). Unknown keys
/// are rejected.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_stream(std::istream& in, const std::string& origin);

/// Apply "key=value" overrides (same keys as the config file) on top of a
/// parsed config; used by the CLI to give flags precedence.
void apply_override(RunConfig& config, const std::string& key,
                    const std::string& value);

/// Execute a validated config: solve the requested case or suite and write
/// CSV artifacts plus a metadata text block into out_dir. Returns the
/// process exit status (0 on success). Solver failures propagate with case
/// context attached.
int run(const RunConfig& config, std::ostream& log);

// Artifact writers (also used directly by tests).
void write_static_fields_csv(std::ostream& out, const StaticRunReport& report,
                             const CaseSpec& spec);
void write_dynamic_fields_csv(std::ostream& out,
                              const DynamicRunReport& report,
                              const CaseSpec& spec);
void write_refinement_csv(std::ostream& out,
                          const std::vector<RefinementRow>& rows,
                          const AuxParams& aux);
void write_newton_history(std::ostream& out, const NewtonReport& report);

struct ConvexityCheckResult {
  int samples = 0;
  int lower_violations = 0;
  int upper_violations = 0;
  int infinity_misses = 0;
  int convexity_violations = 0;
};

/// Run the dual-density bound checks for both models and emit the report
/// rows (point hash, g, bounds, margins) as CSV.
ConvexityCheckResult run_convexity_suite(int samples, std::uint64_t seed,
                                         std::ostream& svk_csv,
                                         std::ostream& neo_csv);

}  // namespace dve
