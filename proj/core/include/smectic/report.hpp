#pragma once

#include "smectic/cases.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace smectic {

/// log2(e[k-1] / e[k]) for uniform refinement; empty for the first entry and
/// whenever a ratio is not positive and finite.
std::vector<std::optional<double>> eoc_sequence(const std::vector<double>& errors);

/// A CSV table with a fixed header. Numbers are written with 17 significant digits.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::vector<std::string> cells);
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    /// Recomputes `eoc_col` from `err_col` and throws ReportError on mismatch.
    void check_eoc(const std::string& err_col, const std::string& eoc_col) const;
    void write(const std::filesystem::path& path) const;

    static std::string number(double v);
    static std::string number(const std::optional<double>& v);

private:
    std::size_t column_index(const std::string& name) const;

    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Vector value at corner c of triangle t.
using CornerVectorFn = std::function<Vec2(int t, int c)>;

/// Closed-form director at the corners, evaluated at points pulled 1e-9
/// toward the element centroid so that singular sets on vertices are avoided.
CornerVectorFn director_at_corners(const Mesh& mesh, const numerics::VectorFn& nu);

/// (cos phi_h, sin phi_h) at the corners.
CornerVectorFn angle_director_at_corners(const P2Space& space, const Eigen::VectorXd& phi);

/// Legacy ASCII VTK of a discontinuous P1 field: three points per triangle,
/// optionally with a director written as point vectors "nu".
void write_vtk_p1(const std::filesystem::path& path, const Mesh& mesh, const P1Field& u, const std::string& name,
                  const CornerVectorFn& director = {});

/// Legacy ASCII VTK of a P2 angle field on the once-subdivided triangulation
/// whose points are the P2 nodes; nu = (cos phi, sin phi) as point vectors.
void write_vtk_p2_angle(const std::filesystem::path& path, const P2Space& space, const Eigen::VectorXd& phi);

struct RunConfig {
    std::string case_name;
    CaseOverrides overrides;
    int levels = 5; ///< number of meshes, starting from the 4-element mesh
    Discretization disc;
    UzawaConfig uzawa;
    std::filesystem::path out_dir = "out";
    bool write_fields = true;

    /// Throws ConfigurationError for levels < 1 or an invalid output path.
    void validate() const;
};

/// Writes manifest.txt with every parameter of the run.
void write_manifest(const RunConfig& config, const Case& c, const std::string& command);

struct LinearLevel {
    int level = 0;
    int num_triangles = 0;
    double h = 0.0;
    LinearErrors errors;
    double norm_divdiv = 0.0;
    double galerkin_defect = 0.0; ///< |err^2 - (||M||^2 - ||M_h||^2)| / ||M||^2
    double identity_defect = 0.0; ///< |m ||u - ũ|| - err_divdiv| / err_divdiv
    SolveStats solve;
};

/// errors.csv: level, num_triangles, h, err_L2, err_divdiv, err_u, eoc_L2,
/// eoc_divdiv, eoc_u, galerkin_defect, identity_defect, solver_residual.
std::vector<LinearLevel> run_linear_convergence(const RunConfig& config);

struct FieldLevel {
    int level = 0;
    int num_triangles = 0;
    double h = 0.0;
    double norm_divdiv = 0.0;
    double u_norm = 0.0;
    SolveStats solve;
};
struct FieldRun {
    std::vector<FieldLevel> levels;
    EnergyErrorSequence errors;
    std::vector<std::optional<double>> eoc;
};

/// norms.csv: level, num_triangles, h, norm_divdiv, err, eoc, clamped; and
/// u_h.vtk on the finest mesh. Needs at least 3 levels.
FieldRun run_linear_field(const RunConfig& config);

struct NonlinearLevel {
    int level = 0;
    int num_triangles = 0;
    double h = 0.0;
    double energy = 0.0;
    std::optional<NonlinearErrors> errors;
    IterationLog log;
};
struct NonlinearRun {
    std::vector<NonlinearLevel> levels;
    std::optional<EnergySequence> energy_errors; ///< absent for manufactured or non-H1 boundary data
    std::vector<std::optional<double>> energy_eoc;
};

/// iterations.csv always; errors.csv for manufactured cases; energy.csv for
/// the others (with err and eoc only when the case reports energy errors);
/// u_h.vtk and phi_h.vtk on the finest mesh.
NonlinearRun run_nonlinear(const RunConfig& config);

} // namespace smectic
