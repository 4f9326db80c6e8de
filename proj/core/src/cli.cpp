#include "blens/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "blens/billiards.hpp"
#include "blens/kernel.hpp"
#include "blens/lattice.hpp"
#include "blens/localize.hpp"
#include "blens/nodal.hpp"
#include "blens/numerics.hpp"
#include "blens/obstruction.hpp"
#include "blens/waves.hpp"

namespace blens {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// --- parsing -------------------------------------------------------------------

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("parameter '" + key + "' is not a number: " + s);
    }
}

long long parse_ll(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("parameter '" + key + "' is not an integer: " + s);
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t from = 0;
    while (from <= s.size()) {
        const std::size_t at = s.find(sep, from);
        if (at == std::string::npos) {
            parts.push_back(s.substr(from));
            break;
        }
        parts.push_back(s.substr(from, at - from));
        from = at + 1;
    }
    return parts;
}

// Flags beat the config file, the config file beats defaults.
struct Args {
    const ExperimentConfig& cfg;
    nlohmann::json file;  // null when no config file given

    std::optional<std::string> raw(const std::string& key) const {
        const auto it = cfg.overrides.find(key);
        if (it != cfg.overrides.end()) return it->second;
        return std::nullopt;
    }

    std::string str(const std::string& key, const std::string& def) const {
        if (auto s = raw(key)) return *s;
        if (file.contains(key) && file[key].is_string()) return file[key].get<std::string>();
        return def;
    }

    double num(const std::string& key, double def) const {
        if (auto s = raw(key)) return parse_double(*s, key);
        if (file.contains(key) && file[key].is_number()) return file[key].get<double>();
        return def;
    }

    long long integer(const std::string& key, long long def) const {
        if (auto s = raw(key)) return parse_ll(*s, key);
        if (file.contains(key) && file[key].is_number_integer()) return file[key].get<long long>();
        return def;
    }

    bool flag(const std::string& key) const {
        if (auto s = raw(key)) return *s == "1" || *s == "true";
        if (file.contains(key) && file[key].is_boolean()) return file[key].get<bool>();
        return false;
    }

    Vec2 vec2(const std::string& key, const Vec2& def) const {
        if (auto s = raw(key)) {
            const auto parts = split(*s, ',');
            if (parts.size() != 2) throw ValidationError("parameter '" + key + "' needs two coordinates");
            return {parse_double(parts[0], key), parse_double(parts[1], key)};
        }
        if (file.contains(key) && file[key].is_array() && file[key].size() == 2)
            return {file[key][0].get<double>(), file[key][1].get<double>()};
        return def;
    }

    std::vector<long long> list_ll(const std::string& key, std::vector<long long> def) const {
        if (auto s = raw(key)) {
            std::vector<long long> out;
            for (const std::string& p : split(*s, ',')) out.push_back(parse_ll(p, key));
            return out;
        }
        if (file.contains(key) && file[key].is_array()) {
            std::vector<long long> out;
            for (const auto& v : file[key]) out.push_back(v.get<long long>());
            return out;
        }
        return def;
    }
};

double positive(double v, const std::string& key) {
    if (!(v > 0.0)) throw ValidationError("parameter '" + key + "' must be positive");
    return v;
}

BC parse_bc(const std::string& name) {
    if (name == "dirichlet") return BC::Dirichlet;
    if (name == "neumann") return BC::Neumann;
    if (name == "robin") return BC::Robin;
    throw ValidationError("unknown boundary condition: " + name);
}

BilliardSpec parse_billiard(const std::string& name) {
    if (name == "square") return BilliardSpec::square();
    if (name == "sqrt2") return BilliardSpec::rectangle({{SideSquared::Token::Sqrt2, 1, 1}});
    if (name == "iso") return BilliardSpec::iso();
    if (name == "equi") return BilliardSpec::equi();
    if (name == "hemi") return BilliardSpec::hemi();
    throw ValidationError("unknown billiard: " + name);
}

Polygon parse_polygon_tag(const std::string& name) {
    if (name == "square") return Polygon::Square;
    if (name == "equi") return Polygon::EquiTriangle;
    throw ValidationError("unknown lattice polygon: " + name);
}

// translate-form targets; default is the radial window profile at the origin
WaveSpec parse_target(const Args& a) {
    WaveSpec w;
    w.kind = WaveSpec::Kind::Translates;
    if (a.file.contains("target") && a.file["target"].contains("translates")) {
        for (const auto& t : a.file["target"]["translates"]) {
            Translate tr;
            tr.center = {t["center"][0].get<double>(), t["center"][1].get<double>()};
            tr.coeff = t["coeff"].get<double>();
            w.translates.translates.push_back(tr);
        }
        if (w.translates.translates.empty()) throw ValidationError("target has no translates");
        return w;
    }
    w.translates.translates = {{{0.0, 0.0}, 1.0}};
    return w;
}

// --- output --------------------------------------------------------------------

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << body;
}

ordered_json tree_json(const RootedTree& t) {
    ordered_json node;
    node["children"] = ordered_json::array();
    for (const RootedTree& c : t.children) node["children"].push_back(tree_json(c));
    return node;
}

// --- field samplers -------------------------------------------------------------

std::vector<Vec2> ball_points(double radius, double step) {
    std::vector<Vec2> pts;
    const int n = static_cast<int>(std::floor(radius / step));
    for (int iy = -n; iy <= n; ++iy)
        for (int ix = -n; ix <= n; ++ix) {
            const Vec2 w{ix * step, iy * step};
            if (w[0] * w[0] + w[1] * w[1] <= radius * radius) pts.push_back(w);
        }
    return pts;
}

std::string profile_csv(const LocalizedBuild& b, const WaveSpec& target, double radius,
                        double step) {
    std::string csv = "t,value,target\n";
    const int n = static_cast<int>(std::floor(radius / step));
    for (int i = -n; i <= n; ++i) {
        const double t = i * step;
        csv += fmt(t) + "," + fmt(rescaled_value(b, {t, 0.0})) + "," +
               fmt(target.value({t, 0.0})) + "\n";
    }
    return csv;
}

// --- commands --------------------------------------------------------------------

void cmd_shell(const Args& a, ordered_json& report, const fs::path& out) {
    const long long mu = a.integer("mu", 5);
    if (mu <= 0) throw ValidationError("parameter 'mu' must be positive");
    const std::string polygon = a.str("polygon", "square");
    const BilliardSpec spec = polygon == "square" ? BilliardSpec::square() : BilliardSpec::equi();
    parse_polygon_tag(polygon);
    const LatticeShell shell = enumerate_shell(spec.form(), mu);
    report["polygon"] = polygon;
    report["mu"] = mu;
    report["points"] = static_cast<long long>(shell.size());
    if (polygon == "square") report["representation_count"] = representation_count(mu);
    report["discrepancy"] = shell.size() ? angular_discrepancy(shell) : 0.0;
    std::string csv = "n1,n2\n";
    for (const auto& p : shell.points) csv += std::to_string(p[0]) + "," + std::to_string(p[1]) + "\n";
    write_file(out / "shell_points.csv", csv);
}

void cmd_kernel(const Args& a, ordered_json& report, const fs::path& out) {
    const std::vector<long long> mus = a.list_ll("mus", {5, 65, 1105, 32045});
    if (mus.empty()) throw ValidationError("parameter 'mus' is empty");
    const double R = positive(a.num("R", 4.0), "R");
    const int grid = static_cast<int>(positive(a.num("grid", 80.0), "grid"));
    const std::string polygon = a.str("polygon", "square");
    const Polygon tag = parse_polygon_tag(polygon);
    const BilliardSpec spec = tag == Polygon::Square ? BilliardSpec::square() : BilliardSpec::equi();
    report["polygon"] = polygon;
    report["R"] = R;
    report["grid"] = grid;
    ordered_json rows = ordered_json::array();
    std::vector<double> errors;
    for (long long mu : mus) {
        const LatticeShell shell = enumerate_shell(spec.form(), mu);
        if (shell.size() == 0) throw ValidationError("empty shell at mu=" + std::to_string(mu));
        const double err = kernel_vs_bessel(shell, tag, R, grid);
        errors.push_back(err);
        rows.push_back(ordered_json{{"mu", mu}, {"sup_error", err}});
    }
    bool monotone = true;
    for (std::size_t i = 1; i < errors.size(); ++i) monotone = monotone && errors[i] < errors[i - 1];
    report["errors"] = rows;
    report["monotone_decreasing"] = monotone;
    std::string csv = "mu,sup_error\n";
    for (std::size_t i = 0; i < mus.size(); ++i)
        csv += std::to_string(mus[i]) + "," + fmt(errors[i]) + "\n";
    write_file(out / "kernel_errors.csv", csv);
}

LocalizationJob localization_job(const Args& a) {
    LocalizationJob job;
    job.spec = parse_billiard(a.str("polygon", "square"));
    job.bc = parse_bc(a.str("bc", "neumann"));
    job.target = parse_target(a);
    job.shell_value = a.integer("shell", 1105);
    if (job.shell_value <= 0) throw ValidationError("parameter 'shell' must be positive");
    job.z0 = a.vec2("z0", {0.31, 0.47});
    job.window_radius = positive(a.num("window", 4.0), "window");
    job.deriv_order = static_cast<int>(a.integer("k", 1));
    job.grid_step = positive(a.num("grid-step", 0.05), "grid-step");
    return job;
}

void cmd_localize(const Args& a, ordered_json& report, const fs::path& out) {
    const LocalizationJob job = localization_job(a);
    const double error_radius = positive(a.num("error-radius", 2.0), "error-radius");
    const LocalizedBuild b = build_localized(job);
    const double err = localization_error(b, job.target, error_radius, job.deriv_order, job.grid_step);
    report["polygon"] = a.str("polygon", "square");
    report["bc"] = a.str("bc", "neumann");
    report["shell"] = job.shell_value;
    report["z0"] = {job.z0[0], job.z0[1]};
    report["lambda"] = b.u.lambda;
    report["modes"] = static_cast<long long>(b.u.terms.size());
    report["error_radius"] = error_radius;
    report["k"] = job.deriv_order;
    report["grid_step"] = job.grid_step;
    report["window_error"] = err;
    report["lipschitz"] = b.lipschitz;
    write_file(out / "window_profile.csv", profile_csv(b, job.target, error_radius, job.grid_step));
}

void cmd_fixed(const Args& a, ordered_json& report, const fs::path& out) {
    const std::string polygon = a.str("polygon", "square");
    const BilliardSpec spec = parse_billiard(polygon);
    const BC bc = parse_bc(a.str("bc", "neumann"));
    const long long shell = a.integer("shell", 1105);
    if (shell <= 0) throw ValidationError("parameter 'shell' must be positive");
    const Polygon tag = polygon == "square" || polygon == "sqrt2" ? Polygon::Square
                        : polygon == "iso"                        ? Polygon::IsoTriangle
                        : polygon == "equi"                       ? Polygon::EquiTriangle
                                                                  : Polygon::HemiTriangle;
    const WaveSpec target =
        symmetrize(parse_target(a), SymmetryGroup::generate(table_a_reflections(tag)), bc);

    std::vector<RationalCoord> z0;
    const std::string z0r = a.str("z0r", "1/2,1/2");
    for (const std::string& part : split(z0r, ',')) {
        const auto frac = split(part, '/');
        RationalCoord c;
        c.r = parse_ll(frac[0], "z0r");
        c.s = frac.size() > 1 ? parse_ll(frac[1], "z0r") : 1;
        if (c.s <= 0) throw ValidationError("parameter 'z0r' needs positive denominators");
        z0.push_back(c);
    }
    if (z0.size() != 2) throw ValidationError("parameter 'z0r' needs two rational coordinates");

    const LocalizedBuild b = build_fixed_point(spec, bc, target, shell, z0);
    const double error_radius = positive(a.num("error-radius", 2.0), "error-radius");
    const double err = localization_error(b, target, error_radius, 1, 0.05);
    report["polygon"] = polygon;
    report["bc"] = a.str("bc", "neumann");
    report["shell"] = shell;
    report["z0r"] = z0r;
    report["twist"] = b.twist;
    report["lambda"] = b.u.lambda;
    report["parity_defect"] = b.parity_defect;
    report["window_error"] = err;
    write_file(out / "window_profile.csv", profile_csv(b, target, error_radius, 0.05));
}

void cmd_lattice_polygon(const Args& a, ordered_json& report, const fs::path& out) {
    const BC bc = parse_bc(a.str("bc", "neumann"));
    const long long shell = a.integer("shell", 364);
    if (shell <= 0) throw ValidationError("parameter 'shell' must be positive");
    const Vec2 z0 = a.vec2("z0", {0.93, 1.02});
    const double window = positive(a.num("window", 4.0), "window");
    const double error_radius = positive(a.num("error-radius", 2.0), "error-radius");
    const bool roaming = a.flag("roaming");
    const CellDecomposition d = four_cell_equi_polygon();

    LatticePolygonBuild b;
    if (roaming) {
        b = build_on_lattice_polygon_roaming(d, bc, parse_target(a), shell, z0, window);
    } else {
        const WaveSpec sym = symmetrize(
            parse_target(a), SymmetryGroup::generate(table_b_reflections(Polygon::EquiTriangle)), bc);
        b = build_on_lattice_polygon(d, bc, sym, shell, z0, window);
    }
    const UnfoldResult ur = unfold(d, z0);
    const int member = roaming ? ur.cell : 0;
    const EdgeResiduals res = interior_edge_residuals(b, member, 10);
    const double err = lattice_polygon_error(b, error_radius, 0, 0.05);

    const double s3 = std::sqrt(3.0) / 2.0;
    const struct {
        int left, right;
        Vec2 from, to;
    } edges[3] = {{0, 1, {1.0, 0.0}, {0.5, s3}},
                  {1, 2, {0.5, s3}, {1.5, s3}},
                  {2, 3, {1.5, s3}, {2.0, 0.0}}};
    std::string csv = "edge,t,x,y,left,right\n";
    for (int e = 0; e < 3; ++e) {
        for (int i = 1; i <= 9; ++i) {
            const double t = i / 10.0;
            const Vec2 z{edges[e].from[0] + t * (edges[e].to[0] - edges[e].from[0]),
                         edges[e].from[1] + t * (edges[e].to[1] - edges[e].from[1])};
            const double vl = lattice_polygon_value_in_cell(b, member, edges[e].left, z);
            const double vr = lattice_polygon_value_in_cell(b, member, edges[e].right, z);
            csv += std::to_string(e) + "," + fmt(t) + "," + fmt(z[0]) + "," + fmt(z[1]) + "," +
                   fmt(vl) + "," + fmt(vr) + "\n";
        }
    }
    report["bc"] = a.str("bc", "neumann");
    report["shell"] = shell;
    report["z0"] = {z0[0], z0[1]};
    report["roaming"] = roaming;
    report["cells"] = static_cast<long long>(d.cells.size());
    report["members"] = static_cast<long long>(b.base.size());
    report["cell_of_z0"] = ur.cell;
    report["parity_of_z0"] = ur.parity;
    report["value_continuity"] = res.value_jump;
    report["gradient_continuity"] = res.normal_jump;
    report["window_error"] = err;
    write_file(out / "edge_samples.csv", csv);
}

void cmd_obstruct_rect(const Args& a, ordered_json& report, const fs::path& out) {
    const std::string polygon = a.str("polygon", "sqrt2");
    const BilliardSpec spec = parse_billiard(polygon);
    const BC bc = parse_bc(a.str("bc", "dirichlet"));
    const Vec2 z0 = a.vec2("z0", {0.31, 0.47});
    const double threshold = positive(a.num("threshold", 1e-6), "threshold");
    const std::string source = a.str("source", "modes");
    const auto partition = spec.rationality_partition();

    double residual = 0.0;
    if (source == "modes") {
        const std::vector<long long> modes = a.list_ll("modes", {2, 3});
        if (modes.size() != 2) throw ValidationError("parameter 'modes' needs two indices");
        residual = rectangle_variety_residual(rectangle_mode(spec, bc, modes), z0, partition);
    } else if (source == "random") {
        const long long shell = a.integer("shell", 65);
        residual = rectangle_variety_residual(random_eigenfunction(spec, bc, shell, a.cfg.seed), z0,
                                              partition);
    } else if (source == "wave") {
        residual = rectangle_variety_residual(parse_target(a), z0, partition);
    } else {
        throw ValidationError("unknown source: " + source);
    }
    report["test"] = "rect-jet";
    report["polygon"] = polygon;
    report["source"] = source;
    report["z0"] = {z0[0], z0[1]};
    report["residual"] = residual;
    report["threshold"] = threshold;
    report["verdict"] = residual <= threshold ? "on-variety" : "off-variety";
    write_file(out / "rect_jet.csv", "residual,threshold\n" + fmt(residual) + "," + fmt(threshold) + "\n");
}

void cmd_obstruct_disk(const Args& a, ordered_json& report, const fs::path& out) {
    const double r0 = a.num("r0", 0.35);
    const double theta0 = a.num("theta0", 0.0);
    const double R = positive(a.num("R", 0.6), "R");
    const int M = static_cast<int>(positive(a.num("M", 3.0), "M"));
    const double threshold = positive(a.num("threshold", 1e-4), "threshold");
    const std::string source = a.str("source", "bessel");
    int dim = 2;

    RadialField field;
    if (source == "bessel") {
        dim = static_cast<int>(a.integer("d", 2));
        field = bessel_radial_field(a.num("t", 3.7), static_cast<int>(a.integer("l", 2)), dim);
    } else if (source == "disk") {
        const std::vector<long long> mode = a.list_ll("mode", {2, 1, 0});
        if (mode.size() != 3) throw ValidationError("parameter 'mode' needs l,n,variant");
        const DiskMode dm = disk_mode(2, static_cast<int>(mode[0]), static_cast<int>(mode[1]),
                                      parse_bc(a.str("bc", "dirichlet")));
        field = disk_radial_restriction(dm, static_cast<int>(mode[2]), r0, theta0, R);
    } else if (source == "wave") {
        field = wave_radial_restriction(parse_target(a), r0, theta0, R);
    } else {
        throw ValidationError("unknown source: " + source);
    }
    const std::vector<SampleBlock> blocks = radial_samples(field, R, M);
    const std::vector<double> residuals = disk_constraint_residuals(blocks, dim);
    const double worst = disk_constraint_residual(blocks, dim);
    report["test"] = "disk-radial";
    report["source"] = source;
    report["R"] = R;
    report["blocks"] = M;
    report["residual"] = worst;
    report["threshold"] = threshold;
    report["verdict"] = worst <= threshold ? "on-variety" : "off-variety";
    std::string csv = "block,residual\n";
    for (std::size_t i = 0; i < residuals.size(); ++i)
        csv += std::to_string(i) + "," + fmt(residuals[i]) + "\n";
    write_file(out / "disk_blocks.csv", csv);
}

void cmd_obstruct_robin(const Args& a, ordered_json& report, const fs::path& out) {
    const double sigma = a.num("sigma", 0.3);
    if (sigma < 0.0) throw ValidationError("parameter 'sigma' must be nonnegative");
    const std::vector<long long> modes = a.list_ll("modes", {2, 5});
    if (modes.size() != 2 || modes[0] < 0 || modes[1] < 0)
        throw ValidationError("parameter 'modes' needs two nonnegative indices");
    const Vec2 z0 = a.vec2("z0", {0.37, 0.52});
    const double radius = positive(a.num("radius", 1.0), "radius");
    const double step = positive(a.num("step", 0.15), "step");
    const int restarts = static_cast<int>(a.integer("restarts", 8));
    const double threshold = positive(a.num("threshold", 1e-6), "threshold");

    const int m = static_cast<int>(modes[0]), n = static_cast<int>(modes[1]);
    const EigenExpansion u = robin_mode(sigma, m, n);
    const std::vector<double> freqs = robin_frequencies(sigma, std::max(m, n) + 1);
    const double rt = std::sqrt(u.lambda);
    const std::vector<Vec2> pts = ball_points(radius, step);
    std::vector<double> values(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        values[i] = u.value2({z0[0] + pts[i][0] / rt, z0[1] + pts[i][1] / rt});
    const auto warm = robin_window_angles(freqs[m], freqs[n]);
    const PlaneWaveFit fit =
        plane_wave_distance(pts, values, 8, restarts, a.cfg.seed,
                            std::vector<double>(warm.begin(), warm.end()), a.cfg.threads);
    report["test"] = "robin-span";
    report["sigma"] = sigma;
    report["modes"] = {m, n};
    report["lambda"] = u.lambda;
    report["restarts"] = restarts;
    report["residual"] = fit.residual;
    report["threshold"] = threshold;
    report["verdict"] = fit.residual <= threshold ? "on-variety" : "off-variety";
    report["winner"] = fit.winner;
    std::string csv = "angle\n";
    for (double ang : fit.angles) csv += fmt(ang) + "\n";
    write_file(out / "fit_angles.csv", csv);
}

void cmd_robin_freqs(const Args& a, ordered_json& report, const fs::path& out) {
    const double sigma = a.num("sigma", 0.5);
    if (sigma < 0.0) throw ValidationError("parameter 'sigma' must be nonnegative");
    const int count = static_cast<int>(positive(a.num("count", 20.0), "count"));
    const std::vector<double> roots = robin_frequencies(sigma, count);
    const double pi = 3.141592653589793238462643383279502884;
    bool bracketed = true;
    double worst = 0.0;
    for (std::size_t n = 0; n < roots.size(); ++n) {
        if (sigma > 0.0 && !(roots[n] > n * pi && roots[n] < (n + 1) * pi)) bracketed = false;
        worst = std::max(worst, robin_frequency_residual(sigma, roots[n]));
    }
    report["sigma"] = sigma;
    report["count"] = count;
    report["roots"] = roots;
    report["bracketed"] = bracketed;
    report["max_defect"] = worst;
    std::string csv = "n,root\n";
    for (std::size_t n = 0; n < roots.size(); ++n) csv += std::to_string(n) + "," + fmt(roots[n]) + "\n";
    write_file(out / "robin_roots.csv", csv);
}

void cmd_nodal(const Args& a, ordered_json& report, const fs::path& out) {
    const LocalizationJob job = localization_job(a);
    const double radius = positive(a.num("radius", 6.0), "radius");
    const double step = positive(a.num("step", 0.15), "step");
    const LocalizedBuild b = build_localized(job);
    const int n = 2 * static_cast<int>(std::floor(radius / step)) + 1;
    const ScalarGrid grid = tabulate_grid(
        [&](const Vec2& w) { return rescaled_value(b, w); },
        {-std::floor(radius / step) * step, -std::floor(radius / step) * step}, step, n, n);
    const NodalAnalysis analysis = extract_nodal(grid);

    report["shell"] = job.shell_value;
    report["lambda"] = b.u.lambda;
    report["radius"] = radius;
    report["step"] = step;
    report["domains"] = analysis.domain_count;
    ordered_json contours = ordered_json::array();
    ordered_json trees = ordered_json::array();
    for (std::size_t i = 0; i < analysis.contours.size(); ++i) {
        const NodalContour& c = analysis.contours[i];
        ordered_json line;
        line["type"] = "LineString";
        line["closed"] = c.closed;
        if (c.closed) line["area"] = c.area;
        ordered_json coords = ordered_json::array();
        for (const Vec2& p : c.points) coords.push_back(ordered_json::array({p[0], p[1]}));
        line["coordinates"] = coords;
        contours.push_back(line);
        if (c.closed) {
            ordered_json t;
            t["contour"] = i;
            t["root"] = tree_json(nesting_tree(analysis, static_cast<int>(i)));
            trees.push_back(t);
        }
    }
    report["contours"] = contours;
    report["trees"] = trees;
    std::string csv = "contour,x,y\n";
    for (std::size_t i = 0; i < analysis.contours.size(); ++i)
        for (const Vec2& p : analysis.contours[i].points)
            csv += std::to_string(i) + "," + fmt(p[0]) + "," + fmt(p[1]) + "\n";
    write_file(out / "contours.csv", csv);
}

void cmd_covariance(const Args& a, ordered_json& report, const fs::path& out) {
    const long long mu = a.integer("mu", 1105);
    if (mu <= 0) throw ValidationError("parameter 'mu' must be positive");
    const BC bc = parse_bc(a.str("bc", "neumann"));
    const int samples = static_cast<int>(positive(a.num("samples", 2500.0), "samples"));
    const int probes = static_cast<int>(positive(a.num("probes", 20.0), "probes"));
    const double radius = positive(a.num("radius", 2.0), "radius");
    const EigenExpansion u = derandomized_eigenfunction(mu, bc);

    SplitMix64 rng(a.cfg.seed);
    auto draw = [&]() -> Vec2 {
        for (;;) {
            const Vec2 w{rng.uniform(-radius, radius), rng.uniform(-radius, radius)};
            if (w[0] * w[0] + w[1] * w[1] <= radius * radius) return w;
        }
    };
    ordered_json rows = ordered_json::array();
    std::string csv = "x1,x2,y1,y2,empirical,limit,deviation\n";
    double worst = 0.0;
    for (int i = 0; i < probes; ++i) {
        const Vec2 x = draw(), y = draw();
        const double emp = empirical_covariance(u, samples, x, y);
        const double lim = bessel_j(0.0, std::hypot(x[0] - y[0], x[1] - y[1]));
        const double dev = std::abs(emp - lim);
        worst = std::max(worst, dev);
        rows.push_back(ordered_json{
            {"x", {x[0], x[1]}}, {"y", {y[0], y[1]}}, {"empirical", emp}, {"limit", lim}, {"deviation", dev}});
        csv += fmt(x[0]) + "," + fmt(x[1]) + "," + fmt(y[0]) + "," + fmt(y[1]) + "," + fmt(emp) +
               "," + fmt(lim) + "," + fmt(dev) + "\n";
    }
    report["mu"] = mu;
    report["bc"] = a.str("bc", "neumann");
    report["samples"] = samples;
    report["probes"] = rows;
    report["max_deviation"] = worst;
    write_file(out / "covariance_probes.csv", csv);
}

void cmd_genus(const Args& a, ordered_json& report, const fs::path& out) {
    const std::string spec = a.str("angles", "");
    if (spec.empty()) throw ValidationError("parameter 'angles' is required");
    std::vector<std::pair<long long, long long>> angles;
    for (const std::string& part : split(spec, ',')) {
        const auto frac = split(part, '/');
        const long long num = parse_ll(frac[0], "angles");
        const long long den = frac.size() > 1 ? parse_ll(frac[1], "angles") : 1;
        if (num <= 0 || den <= 0) throw ValidationError("angles must be positive fractions of pi");
        angles.push_back({num, den});
    }
    const long long genus = genus_of_polygon(angles);
    report["angles"] = spec;
    report["genus"] = genus;
    std::string csv = "num,den\n";
    for (const auto& [num, den] : angles) csv += std::to_string(num) + "," + std::to_string(den) + "\n";
    write_file(out / "polygon_angles.csv", csv);
}

}  // namespace

int run_experiment(const ExperimentConfig& config) {
    const fs::path out = config.out_dir.empty() ? fs::path(".") : fs::path(config.out_dir);
    ordered_json report;
    report["command"] = config.command;
    report["seed"] = config.seed;
    report["threads"] = config.threads;
    try {
        if (config.command.empty()) throw ValidationError("no command given");
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw ValidationError("cannot create output directory " + out.string());

        Args args{config, nlohmann::json()};
        if (!config.config_path.empty()) {
            std::ifstream in(config.config_path);
            if (!in) throw ValidationError("cannot read config file " + config.config_path);
            try {
                in >> args.file;
            } catch (const std::exception& e) {
                throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
            }
            if (!args.file.is_object()) throw ValidationError("config file must hold a JSON object");
        }

        if (config.command == "shell")
            cmd_shell(args, report, out);
        else if (config.command == "kernel")
            cmd_kernel(args, report, out);
        else if (config.command == "localize")
            cmd_localize(args, report, out);
        else if (config.command == "fixed")
            cmd_fixed(args, report, out);
        else if (config.command == "lattice-polygon")
            cmd_lattice_polygon(args, report, out);
        else if (config.command == "obstruct-rect")
            cmd_obstruct_rect(args, report, out);
        else if (config.command == "obstruct-disk")
            cmd_obstruct_disk(args, report, out);
        else if (config.command == "obstruct-robin")
            cmd_obstruct_robin(args, report, out);
        else if (config.command == "robin-freqs")
            cmd_robin_freqs(args, report, out);
        else if (config.command == "nodal")
            cmd_nodal(args, report, out);
        else if (config.command == "covariance")
            cmd_covariance(args, report, out);
        else if (config.command == "genus")
            cmd_genus(args, report, out);
        else
            throw ValidationError("unknown command: " + config.command);
    } catch (const std::exception& e) {
        const bool validation =
            dynamic_cast<const std::invalid_argument*>(&e) != nullptr;
        const int code = validation ? 2 : 3;
        ordered_json err;
        err["command"] = config.command;
        err["seed"] = config.seed;
        err["exit"] = code;
        err["reason"] = e.what();
        const std::string body = err.dump(2) + "\n";
        std::fputs(body.c_str(), stderr);
        std::error_code ec;
        if (fs::exists(out, ec)) {
            std::ofstream dump(out / "error.json", std::ios::binary);
            if (dump) dump << body;
        }
        return code;
    }

    const std::string name = config.command + ".json";
    write_file(out / name, report.dump(2) + "\n");
    std::printf("%s: wrote %s\n", config.command.c_str(), (out / name).string().c_str());
    return 0;
}

}  // namespace blens
