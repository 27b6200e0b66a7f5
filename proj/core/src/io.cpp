#include "quadctrl/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace quadctrl {

Json matrix_to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j).real());
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

Json matrix_imag_to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j).imag());
        out.push_back(std::move(row));
    }
    return out;
}

RealMatrix real_matrix_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw InvalidInputError(what + ": expected a nested array");
    }
    const auto rows = j.size();
    const auto cols = j[0].size();
    RealMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) {
            throw InvalidInputError(what + ": ragged rows");
        }
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) throw InvalidInputError(what + ": non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                j[i][k].get<double>();
        }
    }
    return m;
}

}  // namespace

Matrix matrix_from_json(const Json& re, const Json& im, const std::string& what) {
    const RealMatrix mre = real_matrix_from_json(re, what + " (re)");
    const RealMatrix mim = real_matrix_from_json(im, what + " (im)");
    if (mre.rows() != mim.rows() || mre.cols() != mim.cols()) {
        throw InvalidInputError(what + ": re/im shape mismatch");
    }
    return mre.cast<Complex>() + kImag * mim.cast<Complex>();
}

void require_keys(const Json& j, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional, const std::string& what) {
    if (!j.is_object()) throw InvalidInputError(what + ": expected a JSON object");
    for (const auto& key : required) {
        if (!j.contains(key)) throw InvalidInputError(what + ": missing key '" + key + "'");
    }
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                           std::find(optional.begin(), optional.end(), key) != optional.end();
        if (!known) throw InvalidInputError(what + ": unknown key '" + key + "'");
    }
}

Json hamiltonian_to_json(const QuadraticHamiltonian& h) {
    Json j;
    j["n_modes"] = h.n_modes;
    j["G_re"] = matrix_to_json(h.g);
    j["G_im"] = matrix_imag_to_json(h.g);
    j["B_re"] = matrix_to_json(h.b);
    j["B_im"] = matrix_imag_to_json(h.b);
    Json driven = Json::array();
    for (int i = 0; i < h.n_modes; ++i) {
        if (h.drive_mask[static_cast<std::size_t>(i)]) driven.push_back(i);
    }
    j["driven_modes"] = std::move(driven);
    return j;
}

QuadraticHamiltonian hamiltonian_from_json(const Json& j) {
    require_keys(j, {"n_modes", "G_re", "G_im", "B_re", "B_im", "driven_modes"}, {},
                 "QuadraticHamiltonian");
    if (!j["n_modes"].is_number_integer()) {
        throw InvalidInputError("QuadraticHamiltonian: n_modes must be an integer");
    }
    const int n = j["n_modes"].get<int>();
    const Matrix g = matrix_from_json(j["G_re"], j["G_im"], "G");
    const Matrix b = matrix_from_json(j["B_re"], j["B_im"], "B");
    std::vector<bool> mask(static_cast<std::size_t>(std::max(n, 0)), false);
    if (!j["driven_modes"].is_array()) {
        throw InvalidInputError("QuadraticHamiltonian: driven_modes must be an array");
    }
    for (const auto& mode : j["driven_modes"]) {
        if (!mode.is_number_integer()) {
            throw InvalidInputError("QuadraticHamiltonian: driven_modes entries must be integers");
        }
        const int idx = mode.get<int>();
        if (idx < 0 || idx >= n) {
            throw InvalidInputError("QuadraticHamiltonian: driven mode index out of range");
        }
        mask[static_cast<std::size_t>(idx)] = true;
    }
    return QuadraticHamiltonian::create(n, g, b, std::move(mask));
}

namespace {

const char* basis_name(BasisTag tag) {
    switch (tag) {
        case BasisTag::mode_basis: return "mode";
        case BasisTag::quadrature_basis: return "quadrature";
        case BasisTag::custom: return "custom";
    }
    return "custom";
}

BasisTag basis_from_name(const std::string& name) {
    if (name == "mode") return BasisTag::mode_basis;
    if (name == "quadrature") return BasisTag::quadrature_basis;
    if (name == "custom") return BasisTag::custom;
    throw InvalidInputError("LinearControlSystem: unknown basis '" + name + "'");
}

}  // namespace

Json system_to_json(const LinearControlSystem& sys) {
    Json j;
    j["A_re"] = matrix_to_json(sys.a);
    j["A_im"] = matrix_imag_to_json(sys.a);
    j["C_re"] = matrix_to_json(sys.c);
    j["C_im"] = matrix_imag_to_json(sys.c);
    j["basis"] = basis_name(sys.basis_tag);
    return j;
}

LinearControlSystem system_from_json(const Json& j) {
    require_keys(j, {"A_re", "A_im", "C_re", "C_im", "basis"}, {}, "LinearControlSystem");
    return LinearControlSystem::create(matrix_from_json(j["A_re"], j["A_im"], "A"),
                                       matrix_from_json(j["C_re"], j["C_im"], "C"),
                                       basis_from_name(j["basis"].get<std::string>()));
}

LinearControlSystem load_system_file(const std::filesystem::path& path) {
    const Json j = read_json_file(path);
    if (j.contains("n_modes")) return control_system(hamiltonian_from_json(j));
    return system_from_json(j);
}

Json kalman_report_to_json(const KalmanReport& report) {
    Json j;
    j["kalman_re"] = matrix_to_json(report.kalman);
    j["kalman_im"] = matrix_imag_to_json(report.kalman);
    j["singular_values"] = std::vector<double>(
        report.singular_values.data(), report.singular_values.data() + report.singular_values.size());
    j["numerical_rank"] = report.numerical_rank;
    j["rank_tolerance"] = report.rank_tolerance;
    j["controllable"] = report.controllable;
    j["subspace_basis_re"] = matrix_to_json(report.subspace_basis);
    j["subspace_basis_im"] = matrix_imag_to_json(report.subspace_basis);
    return j;
}

Json normal_mode_report_to_json(const NormalModeReport& report) {
    Json j;
    Json eigs = Json::array();
    for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
        eigs.push_back({report.eigenvalues(i).real(), report.eigenvalues(i).imag()});
    }
    j["eigenvalues"] = std::move(eigs);
    j["min_eigenvalue_gap"] = report.min_eigenvalue_gap;
    j["overlaps"] = std::vector<double>(report.overlaps.data(),
                                        report.overlaps.data() + report.overlaps.size());
    j["diagnosis"] = to_string(report.diagnosis);
    j["eigenvector_condition"] = report.eigenvector_condition;
    return j;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Trim to the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == v) return shorter;
    }
    return buf;
}

void write_pulse_csv(const std::filesystem::path& path, const ControlPulse& pulse,
                     const std::vector<double>& grid) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("write_pulse_csv: cannot open " + path.string());
    out << "t";
    for (int k = 1; k <= pulse.controls(); ++k) out << ",u_" << k << "_re,u_" << k << "_im";
    out << "\n";
    for (double t : grid) {
        const Vector u = pulse(t);
        out << format_double(t);
        for (Eigen::Index k = 0; k < u.size(); ++k) {
            out << "," << format_double(u(k).real()) << "," << format_double(u(k).imag());
        }
        out << "\n";
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("write_trajectory_csv: cannot open " + path.string());
    const Eigen::Index d = traj.states.empty() ? 0 : traj.states.front().size();
    const Eigen::Index m = traj.controls.empty() ? 0 : traj.controls.front().size();
    out << "t";
    for (Eigen::Index k = 1; k <= d; ++k) out << ",x_" << k << "_re,x_" << k << "_im";
    for (Eigen::Index k = 1; k <= m; ++k) out << ",u_" << k << "_re,u_" << k << "_im";
    out << "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << format_double(traj.times[i]);
        for (Eigen::Index k = 0; k < d; ++k) {
            out << "," << format_double(traj.states[i](k).real()) << ","
                << format_double(traj.states[i](k).imag());
        }
        for (Eigen::Index k = 0; k < m; ++k) {
            out << "," << format_double(traj.controls[i](k).real()) << ","
                << format_double(traj.controls[i](k).imag());
        }
        out << "\n";
    }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("write_sweep_csv: cannot open " + path.string());
    out << "q,cost\n";
    for (const auto& pt : points) {
        if (!pt.ok) continue;
        out << format_double(pt.q_weight) << "," << format_double(pt.cost) << "\n";
    }
}

Json sweep_to_json(const std::vector<SweepPoint>& points) {
    Json arr = Json::array();
    for (const auto& pt : points) {
        Json p;
        p["q"] = pt.q_weight;
        p["ok"] = pt.ok;
        if (pt.ok) {
            p["cost"] = pt.cost;
        } else {
            p["error"] = pt.error;
        }
        arr.push_back(std::move(p));
    }
    return arr;
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("write_json_file: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("read_json_file: cannot open " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InvalidInputError("read_json_file: " + path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace quadctrl
