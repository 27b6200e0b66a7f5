// JSON and CSV interchange: the Hamiltonian and linear-system schemas,
// structured reports, pulse/trajectory/sweep exports, and run manifests.
#pragma once

#include "quadctrl/controllability.hpp"
#include "quadctrl/dynamics.hpp"
#include "quadctrl/lqr.hpp"
#include "quadctrl/model.hpp"

#include <json.hpp>  // vendored nlohmann/json

#include <filesystem>
#include <string>
#include <vector>

namespace quadctrl {

using Json = nlohmann::json;

// -------- matrices <-> nested re/im arrays --------

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& re, const Json& im, const std::string& what);

// -------- QuadraticHamiltonian schema --------
// {"n_modes": int, "G_re": [[..]], "G_im": [[..]], "B_re": [[..]],
//  "B_im": [[..]], "driven_modes": [int]} -- unknown keys are rejected.

Json hamiltonian_to_json(const QuadraticHamiltonian& h);
QuadraticHamiltonian hamiltonian_from_json(const Json& j);

// -------- generic linear-system schema --------
// {"A_re": [[..]], "A_im": [[..]], "C_re": [[..]], "C_im": [[..]],
//  "basis": "mode"|"quadrature"|"custom"}

Json system_to_json(const LinearControlSystem& sys);
LinearControlSystem system_from_json(const Json& j);

/// Sniffs the schema: a Hamiltonian file is converted through
/// control_system(); a linear-system file loads directly.
LinearControlSystem load_system_file(const std::filesystem::path& path);

Json kalman_report_to_json(const KalmanReport& report);
Json normal_mode_report_to_json(const NormalModeReport& report);

// -------- plot-data exports (one CSV per figure, gnuplot-friendly) --------

/// Columns: t, u_1_re, u_1_im, ...; metadata goes to a JSON sidecar.
void write_pulse_csv(const std::filesystem::path& path, const ControlPulse& pulse,
                     const std::vector<double>& grid);

/// Columns: t, x_1_re, x_1_im, ..., u_1_re, u_1_im, ...
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Columns: q, cost (failed points are skipped; they stay in the JSON report).
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);

Json sweep_to_json(const std::vector<SweepPoint>& points);

void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

/// Requires that j contains exactly the given keys (strict parsing).
void require_keys(const Json& j, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional, const std::string& what);

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace quadctrl
