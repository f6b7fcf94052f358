#include "smectic/error.hpp"
#include "smectic/report.hpp"

#include "../support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace smectic;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir()
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("smectic_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::vector<std::string> read_lines(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) {
        lines.push_back(l);
    }
    return lines;
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string c; std::getline(ss, c, ',');) {
        out.push_back(c);
    }
    if (!s.empty() && s.back() == ',') {
        out.emplace_back();
    }
    return out;
}

struct VtkSummary {
    int points = -1;
    int cells = -1;
    int cell_entries = -1;
    std::vector<double> scalars;
    int vectors = 0;
    bool non_finite = false;
};

VtkSummary parse_vtk(const fs::path& p)
{
    VtkSummary s;
    std::ifstream in(p);
    std::string tok;
    while (in >> tok) {
        if (tok == "nan" || tok == "-nan" || tok == "inf" || tok == "-inf") {
            s.non_finite = true;
        }
        if (tok == "POINTS") {
            in >> s.points >> tok;
        } else if (tok == "CELLS") {
            in >> s.cells >> s.cell_entries;
        } else if (tok == "LOOKUP_TABLE") {
            in >> tok;
            for (int i = 0; i < s.points; ++i) {
                double v = 0.0;
                in >> v;
                s.scalars.push_back(v);
            }
        } else if (tok == "VECTORS") {
            in >> tok >> tok;
            for (int i = 0; i < 3 * s.points; ++i) {
                double v = 0.0;
                if (in >> v) {
                    ++s.vectors;
                }
            }
        }
    }
    return s;
}

} // namespace

TEST(Eoc, SequenceFromErrors)
{
    const auto e = eoc_sequence({1.0, 0.25, 0.0625, 0.0});
    ASSERT_EQ(e.size(), 4u);
    EXPECT_FALSE(e[0]);
    EXPECT_DOUBLE_EQ(*e[1], 2.0);
    EXPECT_DOUBLE_EQ(*e[2], 2.0);
    EXPECT_FALSE(e[3]);
}

TEST(CsvTable, EocConsistencyCheck)
{
    CsvTable t({"err", "eoc"});
    t.add_row({CsvTable::number(1.0), ""});
    t.add_row({CsvTable::number(0.25), CsvTable::number(2.0)});
    EXPECT_NO_THROW(t.check_eoc("err", "eoc"));
    CsvTable bad({"err", "eoc"});
    bad.add_row({CsvTable::number(1.0), ""});
    bad.add_row({CsvTable::number(0.25), CsvTable::number(1.5)});
    EXPECT_THROW(bad.check_eoc("err", "eoc"), ReportError);
    EXPECT_THROW(t.check_eoc("err", "missing"), ReportError);
    EXPECT_THROW(t.add_row({"1"}), ReportError);
}

TEST(CsvTable, NumbersRoundTrip)
{
    const double v = 0.1 + 0.2;
    EXPECT_EQ(std::stod(CsvTable::number(v)), v);
    EXPECT_EQ(CsvTable::number(std::optional<double>{}), "");
}

TEST(Vtk, ZeroFieldOnInitialMesh)
{
    TempDir dir;
    fs::create_directories(dir.path());
    const Mesh mesh = unit_square_crisscross();
    P1Field u;
    u.coeffs.assign(12, 0.0);
    const fs::path p = dir.path() / "u.vtk";
    write_vtk_p1(p, mesh, u, "u_h");
    const VtkSummary s = parse_vtk(p);
    EXPECT_EQ(s.points, 12);
    EXPECT_EQ(s.cells, 4);
    EXPECT_EQ(s.cell_entries, 16);
    ASSERT_EQ(s.scalars.size(), 12u);
    for (double v : s.scalars) {
        EXPECT_EQ(v, 0.0);
    }
    EXPECT_FALSE(s.non_finite);
    EXPECT_EQ(s.vectors, 0);
}

TEST(Vtk, DirectorAndAngleFieldsAreFinite)
{
    TempDir dir;
    fs::create_directories(dir.path());
    const auto mesh = smectic::testing::mesh_family(3)[2];
    P1Field u;
    for (int t = 0; t < mesh->num_triangles(); ++t) {
        for (const Vec2& p : mesh->triangle_points(t)) {
            u.coeffs.push_back(p.x() - p.y());
        }
    }
    // the dipole director is singular at (1/4, 1/2), a mesh vertex
    write_vtk_p1(dir.path() / "u.vtk", *mesh, u, "u_h", director_at_corners(*mesh, director_field(3)));
    const VtkSummary s = parse_vtk(dir.path() / "u.vtk");
    EXPECT_EQ(s.points, 3 * mesh->num_triangles());
    EXPECT_EQ(s.cells, mesh->num_triangles());
    EXPECT_EQ(s.vectors, 3 * s.points);
    EXPECT_FALSE(s.non_finite);
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
        EXPECT_NEAR(s.scalars[i], u.coeffs[i], 1e-15);
    }

    const P2Space space(mesh);
    const Eigen::VectorXd phi = interpolate_p2(space, [](const Vec2& x) { return x.x() * x.y(); });
    write_vtk_p2_angle(dir.path() / "phi.vtk", space, phi);
    const VtkSummary a = parse_vtk(dir.path() / "phi.vtk");
    EXPECT_EQ(a.points, space.num_dofs());
    EXPECT_EQ(a.cells, 4 * mesh->num_triangles());
    EXPECT_EQ(a.vectors, 3 * a.points);
    EXPECT_FALSE(a.non_finite);
}

TEST(Vtk, UnwritablePathThrows)
{
    const Mesh mesh = unit_square_crisscross();
    P1Field u;
    u.coeffs.assign(12, 0.0);
    EXPECT_THROW(write_vtk_p1("/nonexistent-dir/x/u.vtk", mesh, u, "u"), ReportError);
}

TEST(RunConfig, Validation)
{
    RunConfig c;
    c.case_name = "lin-manufactured";
    EXPECT_NO_THROW(c.validate());
    c.levels = 0;
    EXPECT_THROW(c.validate(), ConfigurationError);
    c.levels = 2;
    c.out_dir = "";
    EXPECT_THROW(c.validate(), ConfigurationError);
    c.out_dir = "x";
    c.uzawa.alpha = -1.0;
    EXPECT_THROW(c.validate(), ConfigurationError);
}

TEST(LinearConvergence, SingleLevelHasEmptyEocAndManifest)
{
    TempDir dir;
    RunConfig c;
    c.case_name = "lin-manufactured";
    c.levels = 1;
    c.out_dir = dir.path();
    const auto levels = run_linear_convergence(c);
    ASSERT_EQ(levels.size(), 1u);
    const auto lines = read_lines(dir.path() / "errors.csv");
    ASSERT_EQ(lines.size(), 2u);
    const auto header = split(lines[0]);
    const auto row = split(lines[1]);
    ASSERT_EQ(header.size(), row.size());
    EXPECT_EQ(header[0], "level");
    EXPECT_EQ(header[1], "num_triangles");
    EXPECT_EQ(row[1], "4");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i].rfind("eoc_", 0) == 0) {
            EXPECT_TRUE(row[i].empty()) << header[i];
        }
    }
    write_manifest(c, case_by_name(c.case_name), "test");
    const auto manifest = read_lines(dir.path() / "manifest.txt");
    bool has_quad = false;
    bool has_det = false;
    for (const auto& l : manifest) {
        has_quad = has_quad || l.rfind("quad_degree = 10", 0) == 0;
        has_det = has_det || l.rfind("determinism", 0) == 0;
    }
    EXPECT_TRUE(has_quad);
    EXPECT_TRUE(has_det);
}

TEST(LinearConvergence, MissingExactSolutionSuggestsFieldCommand)
{
    RunConfig c;
    c.case_name = "lin-field-1";
    c.levels = 1;
    try {
        run_linear_convergence(c);
        FAIL() << "expected ConfigurationError";
    } catch (const ConfigurationError& e) {
        EXPECT_NE(std::string(e.what()).find("linear-field"), std::string::npos);
    }
}

TEST(LinearField, NeedsThreeLevels)
{
    RunConfig c;
    c.case_name = "lin-field-1";
    c.levels = 2;
    EXPECT_THROW(run_linear_field(c), ConfigurationError);
}

TEST(LinearField, ZeroLoadGivesZeroNorms)
{
    TempDir dir;
    RunConfig c;
    c.case_name = "lin-field-2";
    c.levels = 3;
    c.overrides.zero_load = true;
    c.out_dir = dir.path();
    const FieldRun run = run_linear_field(c);
    for (std::size_t k = 0; k < run.levels.size(); ++k) {
        EXPECT_EQ(run.levels[k].norm_divdiv, 0.0);
        EXPECT_EQ(run.errors.error[k], 0.0);
    }
    EXPECT_TRUE(run.errors.degenerate);
    EXPECT_TRUE(fs::exists(dir.path() / "norms.csv"));
    EXPECT_TRUE(fs::exists(dir.path() / "u_h.vtk"));
}

TEST(Nonlinear, JumpDataReportsEnergiesWithoutErrors)
{
    TempDir dir;
    RunConfig c;
    c.case_name = "nonlin-eta-3";
    c.levels = 4;
    c.out_dir = dir.path();
    const NonlinearRun run = run_nonlinear(c);
    EXPECT_FALSE(run.energy_errors.has_value());
    const auto header = split(read_lines(dir.path() / "energy.csv")[0]);
    EXPECT_EQ(header, (std::vector<std::string>{"level", "num_triangles", "h", "energy"}));
    const auto iters = read_lines(dir.path() / "iterations.csv");
    EXPECT_EQ(iters.size(), 5u);
    EXPECT_EQ(iters[0], "level,num_triangles,outer,inner_total,inner_mean,res_M_final,status");
    EXPECT_TRUE(fs::exists(dir.path() / "phi_h.vtk"));
    EXPECT_FALSE(parse_vtk(dir.path() / "phi_h.vtk").non_finite);
}

TEST(Nonlinear, LinearCaseIsRejected)
{
    RunConfig c;
    c.case_name = "lin-field-1";
    EXPECT_THROW(run_nonlinear(c), ConfigurationError);
    c.case_name = "nonlin-eta-1";
    EXPECT_THROW(run_linear_field(c), ConfigurationError);
}
