#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pscat/dirichlet.hpp"
#include "pscat/lattice.hpp"
#include "pscat/observables.hpp"
#include "pscat/spectrum.hpp"
#include "pscat/statistics.hpp"

namespace pscat {

struct RunConfig {
  std::string gamma = "golden";  // golden | sqrt2 | decimal literal
  double X = 1e3;
  double phi = 1.5707963267948966;
  std::string mode = "torus";  // torus | dirichlet
  std::optional<Point> z;      // scatterer as fractions of the side lengths
  double eps = 0.5;            // filter exponent
  int k_max = 8;
  double cutoff = 0.0;  // secular tail cutoff; 0 picks the default
  TailMode tail_mode = TailMode::integral_correction;
  std::filesystem::path out = "out";
  bool oracle = false;
  int threads = 0;  // 0 keeps the OpenMP default
  int precision_digits = kMaxPrecisionDigits;
  double clumping_threshold = 1.0;
  double delta_eps = 0.1;  // delta-quantile cut for the rectangle
  std::uint64_t seed = 20240601;
  std::string cache_dir;  // norm-table cache; empty disables it
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
// Checks every module precondition the pipelines rely on.
void validate(const RunConfig& cfg);

// Default scatterer for the rectangle: irrational fractions of both sides.
Point default_scatterer();

// Exit status for an exception thrown by a command: 2 config, 3 numerical,
// 4 capacity, 1 anything else.
int exit_code(const std::exception_ptr& e);

// ---- pipelines shared by the commands and the acceptance suite ----

struct ScarOptions {
  double phi = 1.5707963267948966;
  double eps = 0.5;
  int k_max = 8;
  double clumping_threshold = 1.0;
  double m_lo = 3.0;
  double m_hi = 1e4;
  bool mixed = true;
  double mixed_lo = 100.0;  // mixed elements only for m >= mixed_lo
  TailMode tail_mode = TailMode::integral_correction;
  Exec exec = Exec::parallel;
};

// Norm-table ceiling the scar pipeline needs for a given m_hi.
double scar_table_ceiling(double m_hi);

struct ScarRow {
  std::size_t index = 0;
  double m = 0.0;
  double theta = 0.0;
  double lambda = 0.0;
  double gap = 0.0;
  std::vector<double> pure;  // k = 0..k_max
  double even_deviation = 0.0;
  double odd_max = 0.0;
  // |<Op(e_{zeta,k})>| for (zeta, k) in ((1,0),0), ((1,0),2), ((0,1),0),
  // ((0,1),2); NaN when not computed.
  double mixed[4];
  double mixed_truncation = 0.0;
  bool in_n0 = false;
  bool in_n1 = false;
  bool in_clumping = false;
  bool kept = false;
};

struct ScarExperiment {
  std::vector<ScarRow> rows;
  FilterReport n0, n1, clumping, combined;
  double tail_cutoff = 0.0;
  std::size_t interlacing_failures = 0;
  double max_residual = 0.0;
};

ScarExperiment run_scar_experiment(const NormTable& table,
                                   const ScarOptions& options);
nlohmann::json scar_summary(const ScarExperiment& exp, const ScarOptions& options);

struct StrongCouplingCheck {
  std::size_t count = 0;
  double fraction_localized = 0.0;  // localized_mass(D) >= 0.5
  double fraction_few_neighbours = 0.0;  // <= 16 other norms within D
  double median_mass = 0.0;
};
StrongCouplingCheck run_strong_coupling(const NormTable& table, double m_max,
                                        double D = 3.0);

struct DirichletOptions {
  double f1 = 0.0;
  double f2 = 0.0;
  double phi = 1.5707963267948966;
  double delta_eps = 0.1;
  double gap_eps = 0.5;
  double clumping_threshold = 1.0;
  double m_hi = 1e4;
  int k_max = 8;
  TailMode tail_mode = TailMode::integral_correction;
  std::uint64_t seed = 20240601;
  Exec exec = Exec::parallel;
};

struct DirichletRow {
  std::size_t index = 0;
  double m = 0.0;
  double theta = 0.0;
  double lambda = 0.0;
  double gap = 0.0;
  double delta = 0.0;
  std::vector<double> pure;  // k = 0..k_max
  double deviation2 = 0.0;   // |<Op(e_{0,2})> - cos(2 theta)|
  bool kept = false;
};

struct DirichletExperiment {
  DeltaWeights weights;
  std::vector<DirichletRow> rows;
  FilterReport filter;
  std::size_t interlacing_failures = 0;
  double max_residual = 0.0;
  double character_error = 0.0;  // max over 100 random points
  double discrepancy = 0.0;
  double lattice_constant = 0.0;
};

DirichletExperiment run_dirichlet_experiment(const NormTable& table,
                                             const DirichletOptions& options);
nlohmann::json dirichlet_summary(const DirichletExperiment& exp);

// Max |psi - character expansion| over `count` random points of the
// rectangle, each paired with a random interior lattice vector of norm <= X.
double character_identity_error(const TorusGeometry& geometry, double X,
                                std::uint64_t seed, int count = 100);

// ---- commands ----

struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  bool ok = true;  // false when an oracle comparison failed
};

CommandResult cmd_spectrum(const RunConfig& cfg);
CommandResult cmd_scars(const RunConfig& cfg);
CommandResult cmd_stats(const RunConfig& cfg);
CommandResult cmd_dirichlet(const RunConfig& cfg);
CommandResult cmd_oracle(const RunConfig& cfg);

}  // namespace pscat
