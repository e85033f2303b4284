#include "homogh/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "homogh/covering.hpp"
#include "homogh/error.hpp"
#include "homogh/tessellation.hpp"

namespace homogh {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kCommands{"tessellate", "hororegions",    "build", "verify",
                                         "curvature-scan", "sweep", "fingerprint"};

namespace {

const char* const kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// JSON schema

json cjson(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(where + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

json mu_json(const MuConfig& m) {
    json j{{"kind", m.kind}, {"parameter", m.parameter}};
    json c = json::array();
    for (Complex z : m.coeffs) c.push_back(cjson(z));
    j["coeffs"] = c;
    return j;
}

MuConfig mu_from(const json& j, const std::string& where) {
    check_keys(j, where, {"kind", "parameter", "coeffs"});
    MuConfig m;
    read(j, "kind", m.kind, where);
    read(j, "parameter", m.parameter, where);
    if (j.contains("coeffs")) {
        if (!j["coeffs"].is_array()) throw ConfigError(where + ".coeffs: expected a list");
        for (const auto& c : j["coeffs"]) m.coeffs.push_back(complex_from(c, where + ".coeffs"));
    }
    return m;
}

json fd_json(const FDConfig& f) {
    return {{"h", f.h}, {"richardson", f.richardson}, {"budget", f.budget}};
}

FDConfig fd_from(const json& j, const std::string& where, FDConfig f) {
    check_keys(j, where, {"h", "richardson", "budget"});
    read(j, "h", f.h, where);
    read(j, "richardson", f.richardson, where);
    read(j, "budget", f.budget, where);
    return f;
}

}  // namespace

json to_json(const ExperimentConfig& cfg) {
    const DataConfig& d = cfg.data;
    json targets = json::array(), zeros = json::array();
    for (Complex z : d.targets) targets.push_back(cjson(z));
    for (const auto& z : d.zeros) zeros.push_back({{"a", cjson(z.a)}, {"multiplicity", z.multiplicity}});
    json mus = json::array();
    for (const auto& m : cfg.fingerprint.mus) mus.push_back(mu_json(m));
    const Budgets& b = cfg.budgets;
    const GridConfig& g = cfg.grid;
    return {
        {"data",
         {{"kind", d.kind}, {"targets", targets}, {"per_vertex", d.per_vertex}, {"balance", d.balance},
          {"zeros", zeros}, {"mu", mu_json(d.mu)}, {"rho0", d.rho0}, {"rho0_a", d.rho0_a},
          {"rho0_b", d.rho0_b}, {"v_multiplier", d.v_multiplier}, {"ball_radius", d.ball_radius}}},
        {"grid",
         {{"depth", g.depth}, {"resolution", g.resolution}, {"points", g.points},
          {"radius", g.radius}, {"seed", g.seed}, {"beta_grid", g.beta_grid},
          {"contact_samples", g.contact_samples}, {"curvature_points", g.curvature_points},
          {"curvature_resolution", g.curvature_resolution}, {"curvature_t", g.curvature_t},
          {"curvature_theta", g.curvature_theta}}},
        {"fd", fd_json(cfg.fd)},
        {"curvature_fd", fd_json(cfg.curvature_fd)},
        {"budgets",
         {{"cr", b.cr}, {"xi", b.xi}, {"curl", b.curl}, {"closed", b.closed},
          {"quaternion", b.quaternion}, {"slice", b.slice}, {"structure", b.structure},
          {"beta", b.beta}, {"riemann_flat", b.riemann_flat}, {"ricci", b.ricci},
          {"contact", b.contact}, {"separation", b.separation}}},
        {"sweep",
         {{"ladder", cfg.sweep.ladder}, {"floor", cfg.sweep.floor}, {"metrics", cfg.sweep.metrics}}},
        {"fingerprint",
         {{"samples", cfg.fingerprint.samples}, {"radius", cfg.fingerprint.radius}, {"mus", mus}}},
        {"output", cfg.output},
    };
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    check_keys(j, "config",
               {"data", "grid", "fd", "curvature_fd", "budgets", "sweep", "fingerprint", "output"});
    if (j.contains("data")) {
        const json& d = j["data"];
        const std::string w = "data";
        check_keys(d, w,
                   {"kind", "targets", "per_vertex", "balance", "zeros", "mu", "rho0", "rho0_a",
                    "rho0_b", "v_multiplier", "ball_radius"});
        DataConfig& o = cfg.data;
        read(d, "kind", o.kind, w);
        if (d.contains("targets")) {
            if (!d["targets"].is_array()) throw ConfigError("data.targets: expected a list");
            o.targets.clear();
            for (const auto& t : d["targets"]) o.targets.push_back(complex_from(t, "data.targets"));
        }
        read(d, "per_vertex", o.per_vertex, w);
        read(d, "balance", o.balance, w);
        if (d.contains("zeros")) {
            if (!d["zeros"].is_array()) throw ConfigError("data.zeros: expected a list");
            for (const auto& z : d["zeros"]) {
                check_keys(z, "data.zeros", {"a", "multiplicity"});
                if (!z.contains("a")) throw ConfigError("data.zeros: missing 'a'");
                BlaschkeZero bz{complex_from(z["a"], "data.zeros.a")};
                read(z, "multiplicity", bz.multiplicity, "data.zeros");
                o.zeros.push_back(bz);
            }
        }
        if (d.contains("mu")) o.mu = mu_from(d["mu"], "data.mu");
        read(d, "rho0", o.rho0, w);
        read(d, "rho0_a", o.rho0_a, w);
        read(d, "rho0_b", o.rho0_b, w);
        read(d, "v_multiplier", o.v_multiplier, w);
        read(d, "ball_radius", o.ball_radius, w);
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        const std::string w = "grid";
        check_keys(g, w,
                   {"depth", "resolution", "points", "radius", "seed", "beta_grid",
                    "contact_samples", "curvature_points", "curvature_resolution", "curvature_t",
                    "curvature_theta"});
        GridConfig& o = cfg.grid;
        read(g, "depth", o.depth, w);
        read(g, "resolution", o.resolution, w);
        read(g, "points", o.points, w);
        read(g, "radius", o.radius, w);
        read(g, "seed", o.seed, w);
        read(g, "beta_grid", o.beta_grid, w);
        read(g, "contact_samples", o.contact_samples, w);
        read(g, "curvature_points", o.curvature_points, w);
        read(g, "curvature_resolution", o.curvature_resolution, w);
        read(g, "curvature_t", o.curvature_t, w);
        read(g, "curvature_theta", o.curvature_theta, w);
    }
    if (j.contains("fd")) cfg.fd = fd_from(j["fd"], "fd", cfg.fd);
    if (j.contains("curvature_fd")) cfg.curvature_fd = fd_from(j["curvature_fd"], "curvature_fd", cfg.curvature_fd);
    if (j.contains("budgets")) {
        const json& b = j["budgets"];
        const std::string w = "budgets";
        check_keys(b, w,
                   {"cr", "xi", "curl", "closed", "quaternion", "slice", "structure", "beta",
                    "riemann_flat", "ricci", "contact", "separation"});
        Budgets& o = cfg.budgets;
        read(b, "cr", o.cr, w);
        read(b, "xi", o.xi, w);
        read(b, "curl", o.curl, w);
        read(b, "closed", o.closed, w);
        read(b, "quaternion", o.quaternion, w);
        read(b, "slice", o.slice, w);
        read(b, "structure", o.structure, w);
        read(b, "beta", o.beta, w);
        read(b, "riemann_flat", o.riemann_flat, w);
        read(b, "ricci", o.ricci, w);
        read(b, "contact", o.contact, w);
        read(b, "separation", o.separation, w);
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        check_keys(s, "sweep", {"ladder", "floor", "metrics"});
        read(s, "ladder", cfg.sweep.ladder, "sweep");
        read(s, "floor", cfg.sweep.floor, "sweep");
        read(s, "metrics", cfg.sweep.metrics, "sweep");
    }
    if (j.contains("fingerprint")) {
        const json& f = j["fingerprint"];
        check_keys(f, "fingerprint", {"samples", "radius", "mus"});
        read(f, "samples", cfg.fingerprint.samples, "fingerprint");
        read(f, "radius", cfg.fingerprint.radius, "fingerprint");
        if (f.contains("mus")) {
            if (!f["mus"].is_array()) throw ConfigError("fingerprint.mus: expected a list");
            for (const auto& m : f["mus"]) cfg.fingerprint.mus.push_back(mu_from(m, "fingerprint.mus"));
        }
    }
    read(j, "output", cfg.output, "config");
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    auto positive = [&](double x, const std::string& name) {
        need(std::isfinite(x) && x > 0.0, name + " must be positive");
    };
    need(data.kind == "blaschke" || data.kind == "flat", "data.kind must be blaschke or flat");
    need(data.per_vertex >= 1, "data.per_vertex must be at least 1");
    need(data.rho0 == "canonical" || data.rho0 == "linear", "data.rho0 must be canonical or linear");
    need(data.ball_radius > 0.0 && data.ball_radius < kPi / 4.0, "data.ball_radius must lie in (0, pi/4)");
    positive(data.v_multiplier, "data.v_multiplier");
    for (const auto& m : fingerprint.mus)
        need(m.kind == "scale" || m.kind == "perturb" || m.kind == "polynomial",
             "fingerprint.mus: unknown kind '" + m.kind + "'");
    need(data.mu.kind == "none" || data.mu.kind == "scale" || data.mu.kind == "perturb" ||
             data.mu.kind == "polynomial",
         "data.mu.kind: unknown kind '" + data.mu.kind + "'");
    need(grid.depth >= 0 && grid.depth <= Tessellation::kMaxDepth, "grid.depth out of range");
    need(grid.resolution >= 2, "grid.resolution must be at least 2");
    need(grid.points >= 1, "grid.points must be at least 1");
    need(grid.radius > 0.0 && grid.radius < 1.0, "grid.radius must lie in (0, 1)");
    need(grid.beta_grid >= 2, "grid.beta_grid must be at least 2");
    need(grid.contact_samples >= 1, "grid.contact_samples must be at least 1");
    need(grid.curvature_points >= 1, "grid.curvature_points must be at least 1");
    need(grid.curvature_resolution >= 1, "grid.curvature_resolution must be at least 1");
    need(!grid.curvature_t.empty(), "grid.curvature_t must not be empty");
    for (const FDConfig* f : {&fd, &curvature_fd}) {
        positive(f->h, "fd.h");
        positive(f->budget, "fd.budget");
        need(f->richardson >= 0, "fd.richardson must be nonnegative");
    }
    for (double b : {budgets.cr, budgets.xi, budgets.curl, budgets.closed, budgets.quaternion,
                     budgets.slice, budgets.structure, budgets.beta, budgets.riemann_flat,
                     budgets.ricci, budgets.contact, budgets.separation})
        positive(b, "budgets");
    need(!sweep.ladder.empty(), "sweep.ladder must not be empty");
    for (std::size_t k = 0; k < sweep.ladder.size(); ++k) {
        need(sweep.ladder[k] > 0.0 && sweep.ladder[k] < 1.0, "sweep.ladder values must lie in (0, 1)");
        need(k == 0 || sweep.ladder[k] > sweep.ladder[k - 1], "sweep.ladder must increase");
    }
    positive(sweep.floor, "sweep.floor");
    for (const auto& m : sweep.metrics) metric_tag_from_string(m);
    need(fingerprint.samples >= 1, "fingerprint.samples must be at least 1");
    need(fingerprint.radius > 0.0 && fingerprint.radius < 1.0, "fingerprint.radius must lie in (0, 1)");
    need(!output.empty(), "output must not be empty");
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string file_sha256(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

MuSpec mu_spec(const MuConfig& m) {
    if (m.kind == "scale") return MuSpec::scale(m.parameter);
    if (m.kind == "perturb") return MuSpec::perturb(m.parameter);
    if (m.kind == "polynomial") return MuSpec::polynomial(m.coeffs);
    throw ConfigError("mu kind '" + m.kind + "' has no map");
}

HolomorphicData build_data(const DataConfig& d) {
    if (d.kind == "flat") return HolomorphicData::flat().with_v_multiplier(d.v_multiplier);
    BlaschkeSpec spec;
    if (!d.zeros.empty()) {
        spec.zeros = d.zeros;
        spec.validate();
    } else {
        spec = vertex_targeted_spec(d.targets, d.per_vertex, d.balance);
    }
    std::optional<MuSpec> mu;
    if (d.mu.kind != "none") mu = mu_spec(d.mu);
    Rho0Policy rho0;
    if (d.rho0 == "linear") {
        const double a = d.rho0_a, b = d.rho0_b;
        rho0 = Rho0Policy::custom(
            [a, b](Complex z) { return std::array<double, 3>{a * z.real() + b * z.imag(), a, b}; },
            "linear");
    }
    return HolomorphicData::blaschke(spec, mu, rho0).with_v_multiplier(d.v_multiplier);
}

VerifyConfig verify_config(const ExperimentConfig& cfg) {
    VerifyConfig v;
    v.points = cfg.grid.points;
    v.radius = cfg.grid.radius;
    v.seed = cfg.grid.seed;
    v.fd = cfg.fd;
    v.curvature_fd = cfg.curvature_fd;
    const Budgets& b = cfg.budgets;
    v.budget_cr = b.cr;
    v.budget_xi = b.xi;
    v.budget_curl = b.curl;
    v.budget_closed = b.closed;
    v.budget_quaternion = b.quaternion;
    v.budget_slice = b.slice;
    v.budget_structure = b.structure;
    v.budget_beta = b.beta;
    v.budget_riemann_flat = b.riemann_flat;
    v.budget_ricci = b.ricci;
    v.curvature_points = cfg.grid.curvature_points;
    return v;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Csv {
public:
    explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {
        for (std::size_t k = 0; k < columns_.size(); ++k) os_ << (k ? "," : "") << columns_[k];
        os_ << '\n';
    }
    Csv& cell(const std::string& s) {
        os_ << (first_ ? "" : ",") << s;
        first_ = false;
        return *this;
    }
    Csv& cell(double x) { return cell(num(x)); }
    Csv& cell(long long x) { return cell(std::to_string(x)); }
    Csv& cell(int x) { return cell(std::to_string(x)); }
    Csv& cell(std::size_t x) { return cell(std::to_string(x)); }
    void end() {
        os_ << '\n';
        first_ = true;
    }
    const std::vector<std::string>& columns() const { return columns_; }
    std::string str() const { return os_.str(); }

private:
    std::vector<std::string> columns_;
    std::ostringstream os_;
    bool first_ = true;
};

struct Artifact {
    std::string name;
    std::vector<std::string> columns;
};

class Run {
public:
    Run(const ExperimentConfig& cfg, std::string command, std::ostream& diag)
        : cfg_(cfg), command_(std::move(command)), diag_(diag), dir_(cfg.output) {
        fs::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& bytes,
               std::vector<std::string> columns = {}) {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << bytes;
        if (!out) throw PathError("cannot write " + (dir_ / name).string());
        files_.push_back({name, std::move(columns)});
    }
    void write(const std::string& name, const Csv& csv) { write(name, csv.str(), csv.columns()); }

    void diag(const std::string& line) { diag_ << "cmd=" << command_ << ' ' << line << '\n'; }

    json summary = json::object();

    void finish(const std::string& status, int exit_code) {
        const fs::path mpath = dir_ / "manifest.json";
        const json cj = to_json(cfg_);
        const std::string hash = sha256_hex(cj.dump());
        json m;
        if (fs::exists(mpath)) {
            std::ifstream in(mpath);
            try {
                in >> m;
            } catch (const json::exception&) {
                m = json();
            }
            if (!m.is_object() || m.value("config_hash", "") != hash) m = json();
        }
        if (m.is_null()) {
            m = json{{"config_hash", hash}, {"config", cj}, {"commands", json::object()},
                     {"files", json::object()}};
            json versions;
            for (const char* mod : {"complex-kernel", "tessellation", "covering", "ansatz", "verify",
                                    "path-lab", "cli"})
                versions[mod] = kVersion;
            m["versions"] = versions;
        }
        m["commands"][command_] = {{"status", status}, {"exit", exit_code}, {"summary", summary}};
        for (const auto& f : files_) {
            json entry{{"sha256", file_sha256(dir_ / f.name)}, {"command", command_}};
            if (!f.columns.empty()) entry["columns"] = f.columns;
            m["files"][f.name] = entry;
        }
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        m["updated"] = stamp;
        std::ofstream(mpath) << m.dump(2) << '\n';
        diag("status=" + status + " exit=" + std::to_string(exit_code) +
             " files=" + std::to_string(files_.size()));
    }

    const ExperimentConfig& cfg() const { return cfg_; }

private:
    const ExperimentConfig& cfg_;
    std::string command_;
    std::ostream& diag_;
    fs::path dir_;
    std::vector<Artifact> files_;
};

// SVG in disc coordinates scaled to a 600 px square.
class Svg {
public:
    Svg() {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
               "viewBox=\"-1.05 -1.05 2.1 2.1\">\n"
            << "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" stroke-width=\"0.004\"/>\n";
    }
    void polyline(const std::vector<Complex>& pts, const char* colour, double width) {
        os_ << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << width
            << "\" points=\"";
        for (std::size_t k = 0; k < pts.size(); ++k) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s%.6f,%.6f", k ? " " : "", pts[k].real(), -pts[k].imag());
            os_ << buf;
        }
        os_ << "\"/>\n";
    }
    void dot(Complex z, double r, const char* colour) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.6f\" cy=\"%.6f\" r=\"%.4f\" fill=\"%s\"/>\n",
                      z.real(), -z.imag(), r, colour);
        os_ << buf;
    }
    std::string str() const { return os_.str() + "</svg>\n"; }

private:
    std::ostringstream os_;
};

std::vector<Complex> geodesic_points(const Geodesic& g, int n = 48) {
    if (g.diameter) return {g.endpoints[0], g.endpoints[1]};
    const double a0 = std::arg(g.endpoints[0] - g.center);
    double da = std::arg(g.endpoints[1] - g.center) - a0;
    while (da > kPi) da -= 2.0 * kPi;
    while (da < -kPi) da += 2.0 * kPi;
    std::vector<Complex> pts;
    for (int k = 0; k <= n; ++k) pts.push_back(g.center + std::polar(g.radius, a0 + da * k / n));
    return pts;
}

void draw_tessellation(Svg& svg, const Tessellation& tess) {
    std::set<std::pair<std::string, std::string>> drawn;
    for (const auto& t : tess.triangles())
        for (int k = 0; k < 3; ++k) {
            auto a = t.cusps[(k + 1) % 3].str(), b = t.cusps[(k + 2) % 3].str();
            if (b < a) std::swap(a, b);
            if (!drawn.insert({a, b}).second) continue;
            svg.polyline(geodesic_points(t.sides[k]), "#555555", 0.003);
        }
}

int cmd_tessellate(Run& run) {
    const Tessellation tess(run.cfg().grid.depth);
    Csv tri({"index", "depth", "word", "cusp0", "cusp1", "cusp2", "v0_re", "v0_im", "v1_re", "v1_im",
             "v2_re", "v2_im"});
    for (std::size_t k = 0; k < tess.triangles().size(); ++k) {
        const auto& t = tess.triangles()[k];
        tri.cell(k).cell(t.depth).cell(t.word.empty() ? std::string("-") : t.word);
        for (const auto& c : t.cusps) tri.cell(c.str());
        for (Complex v : t.vertices) tri.cell(v.real()).cell(v.imag());
        tri.end();
    }
    Csv ver({"index", "label", "re", "im"});
    for (const auto& v : tess.vertices()) ver.cell(v.index).cell(v.label.str()).cell(v.z.real()).cell(v.z.imag()).end();
    Svg svg;
    draw_tessellation(svg, tess);
    run.write("tessellation_triangles.csv", tri);
    run.write("tessellation_vertices.csv", ver);
    run.write("tessellation.svg", svg.str());
    run.summary = {{"triangles", tess.triangles().size()}, {"vertices", tess.vertices().size()},
                   {"max_boundary_gap", tess.max_boundary_gap()}};
    run.diag("triangles=" + std::to_string(tess.triangles().size()) +
             " vertices=" + std::to_string(tess.vertices().size()));
    return 0;
}

// Grid of disc points inside radius, row-major over [-radius, radius]^2.
std::vector<Complex> square_grid(int n, double half, double radius) {
    std::vector<Complex> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = n == 1 ? 0.0 : -half + 2.0 * half * j / (n - 1);
            const double v = n == 1 ? 0.0 : half - 2.0 * half * i / (n - 1);
            const Complex z{u, v};
            if (std::abs(z) < radius) out.push_back(z);
        }
    return out;
}

int cmd_hororegions(Run& run) {
    const auto& cfg = run.cfg();
    const Tessellation tess(cfg.grid.depth);
    const CoveringPhi map;
    const double r = cfg.data.ball_radius;
    Csv csv({"u", "v", "puncture", "doubled_only", "cusp", "vertex"});
    std::array<int, 4> counts{};
    for (Complex z : square_grid(cfg.grid.resolution, 0.999, 0.999)) {
        int puncture = 0;
        bool doubled_only = false;
        HororegionResult hit;
        for (int j = 1; j <= 3 && !puncture; ++j) {
            const auto inner = hororegion_test(map, tess, z, j, r, false);
            const auto outer = inner.member ? inner : hororegion_test(map, tess, z, j, r, true);
            if (outer.member) {
                puncture = j;
                doubled_only = !inner.member;
                hit = outer;
            }
        }
        ++counts[puncture];
        csv.cell(z.real()).cell(z.imag()).cell(puncture).cell(doubled_only ? 1 : 0)
            .cell(hit.cusp ? hit.cusp->str() : std::string("-"))
            .cell(hit.vertex ? std::to_string(*hit.vertex) : std::string("-"));
        csv.end();
    }
    run.write("hororegions.csv", csv);
    run.summary = {{"outside", counts[0]}, {"p1", counts[1]}, {"p2", counts[2]}, {"p3", counts[3]}};
    run.diag("outside=" + std::to_string(counts[0]) + " p1=" + std::to_string(counts[1]) +
             " p2=" + std::to_string(counts[2]) + " p3=" + std::to_string(counts[3]));
    return 0;
}

int cmd_build(Run& run) {
    const auto& cfg = run.cfg();
    const HolomorphicData data = build_data(cfg.data);
    Csv csv({"u", "v", "psi_re", "psi_im", "phi_re", "phi_im", "rho", "V", "x1", "x2", "x3", "slice_t"});
    int rows = 0;
    for (Complex z : square_grid(cfg.grid.resolution, cfg.grid.radius, cfg.grid.radius)) {
        if (data.map().puncture_clearance(z) <= 0.0) continue;
        const Complex psi = data.psi().value(z);
        const MomentumValue mv = momentum_map(data, z, 0.0);
        csv.cell(z.real()).cell(z.imag()).cell(psi.real()).cell(psi.imag());
        const Complex phi = -1.0 / psi;
        csv.cell(phi.real()).cell(phi.imag()).cell(mv.rho).cell(potential_V(data, z, 0.0));
        csv.cell(mv.x(0)).cell(mv.x(1)).cell(mv.x(2)).cell(slice_t(data, z));
        csv.end();
        ++rows;
    }
    run.write("build.csv", csv);
    run.summary = {{"label", data.label()}, {"rows", rows}};
    run.diag("label=" + data.label() + " rows=" + std::to_string(rows));
    return 0;
}

json check_json(const CheckResult& c) {
    return {{"name", c.name},       {"residual", c.residual}, {"budget", c.budget},
            {"noise_floor", c.noise_floor}, {"samples", c.samples}, {"passed", c.passed},
            {"note", c.note}};
}

int cmd_verify(Run& run) {
    const auto& cfg = run.cfg();
    const HolomorphicData data = build_data(cfg.data);
    std::vector<CheckResult> checks = verify_suite(data, verify_config(cfg));
    json report{{"label", data.label()}};
    if (!data.constant_phi()) {
        const BetaAnalysis ba = beta_analysis(data, cfg.grid.beta_grid, cfg.grid.radius,
                                              cfg.grid.contact_samples, cfg.grid.seed, cfg.fd);
        const int n = static_cast<int>(ba.contact.size());
        checks.push_back(make_check("contact_identity", ba.max_identity_residual,
                                    cfg.budgets.contact, 0.0, n,
                                    "beta ^ d beta = -(b1^2 + b2^2 + b3^2) vol"));
        CheckResult sign;
        sign.name = "contact_sign";
        sign.residual = ba.max_ratio;
        sign.samples = n;
        sign.passed = n > 0 && ba.max_ratio < 0.0;
        sign.note = "largest ratio of beta ^ d beta to the volume form";
        checks.push_back(sign);
        CheckResult locus;
        locus.name = "beta_zero_locus";
        locus.residual = ba.min_root_separation;
        locus.budget = cfg.budgets.separation;
        locus.samples = ba.seeds;
        locus.passed = ba.roots.size() < 2 || ba.min_root_separation > cfg.budgets.separation;
        locus.note = std::to_string(ba.roots.size()) + " zeros, smallest separation";
        checks.push_back(locus);
        json roots = json::array();
        for (Complex z : ba.roots) roots.push_back(cjson(z));
        report["beta_zeros"] = roots;
    }
    bool ok = true;
    json arr = json::array();
    for (const auto& c : checks) {
        ok = ok && c.passed;
        arr.push_back(check_json(c));
        run.diag("check=" + c.name + " status=" + (c.passed ? "PASS" : "FAIL") +
                 " residual=" + num(c.residual) + " budget=" + num(c.budget) +
                 " noise=" + num(c.noise_floor));
    }
    report["checks"] = arr;
    report["passed"] = ok;
    run.write("verify.json", report.dump(2) + "\n");
    json summary;
    for (const auto& c : checks) summary[c.name] = {{"residual", c.residual}, {"passed", c.passed}};
    run.summary = summary;
    return ok ? 0 : 1;
}

int cmd_curvature_scan(Run& run) {
    const auto& cfg = run.cfg();
    const HolomorphicData data = build_data(cfg.data);
    const MetricSampler g = metric_sampler(data);
    Csv csv({"u", "v", "t", "theta", "max_riemann", "ricci_norm", "noise_floor"});
    const double half = cfg.grid.radius / std::sqrt(2.0);
    double worst_riem = 0.0, worst_ric = 0.0, worst_noise = 0.0;
    int n = 0;
    for (Complex z : square_grid(cfg.grid.curvature_resolution, half, 1.0)) {
        if (data.map().puncture_clearance(z) < 0.02) continue;
        for (double t : cfg.grid.curvature_t) {
            const CurvatureReport r =
                curvature(g, Vec4(z.real(), z.imag(), t, cfg.grid.curvature_theta), cfg.curvature_fd);
            csv.cell(z.real()).cell(z.imag()).cell(t).cell(cfg.grid.curvature_theta)
                .cell(r.max_riemann).cell(r.ricci_norm).cell(r.noise_floor);
            csv.end();
            worst_riem = std::max(worst_riem, r.max_riemann);
            worst_ric = std::max(worst_ric, r.ricci_norm);
            worst_noise = std::max(worst_noise, r.noise_floor);
            ++n;
        }
    }
    run.write("curvature.csv", csv);
    run.summary = {{"points", n}, {"max_riemann", worst_riem}, {"max_ricci", worst_ric},
                   {"max_noise", worst_noise}};
    run.diag("points=" + std::to_string(n) + " max_riemann=" + num(worst_riem) +
             " max_ricci=" + num(worst_ric) + " noise=" + num(worst_noise));
    return 0;
}

int cmd_sweep(Run& run) {
    const auto& cfg = run.cfg();
    const HolomorphicData data = build_data(cfg.data);
    std::vector<SweepTarget> targets{SweepTarget::golden()};
    for (std::size_t k = 0; k < cfg.data.targets.size(); ++k)
        targets.push_back(SweepTarget::vertex(cfg.data.targets[k], "vertex" + std::to_string(k)));
    SweepConfig sc;
    sc.ladder = cfg.sweep.ladder;
    sc.floor = cfg.sweep.floor;
    Csv csv({"target", "metric", "r", "length", "evidence"});
    json summary;
    for (const auto& mname : cfg.sweep.metrics) {
        const MetricTag tag = metric_tag_from_string(mname);
        for (const auto& res : divergence_sweeps(targets, data, tag, sc)) {
            for (std::size_t k = 0; k < res.profile.r.size(); ++k)
                csv.cell(res.target.key).cell(mname).cell(res.profile.r[k])
                    .cell(res.profile.length[k]).cell(to_string(res.evidence)).end();
            summary[res.target.key][mname] = to_string(res.evidence);
            run.diag("target=" + res.target.key + " metric=" + mname +
                     " evidence=" + to_string(res.evidence) + " min_increment=" + num(res.min_increment));
        }
    }
    Svg svg;
    draw_tessellation(svg, Tessellation(std::min(cfg.grid.depth, 6)));
    for (const auto& t : targets) {
        svg.polyline({Complex{}, cfg.sweep.ladder.back() * t.boundary_point}, "#c0392b", 0.006);
        svg.dot(t.boundary_point, 0.015, "#c0392b");
    }
    run.write("sweep.csv", csv);
    run.write("sweep.svg", svg.str());
    run.summary = summary;
    return 0;
}

std::string mu_label(const MuConfig& m) { return m.kind == "none" ? "none" : mu_spec(m).label(); }

int cmd_fingerprint(Run& run) {
    const auto& cfg = run.cfg();
    std::vector<MuConfig> mus = cfg.fingerprint.mus;
    if (mus.empty()) mus = {{"scale", 1.0, {}}, {"scale", 2.0, {}}, {"perturb", 0.05, {}}};
    const auto samples = disc_sample(cfg.fingerprint.samples, cfg.fingerprint.radius);
    std::vector<std::vector<double>> prints;
    std::vector<std::string> cols{"index", "u", "v"};
    for (const auto& m : mus) {
        DataConfig d = cfg.data;
        if (d.kind != "blaschke") throw ConfigError("fingerprints need Blaschke data");
        d.mu = m;
        prints.push_back(radial_graph_fingerprint(build_data(d), samples));
        cols.push_back(mu_label(m));
    }
    Csv csv(cols);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        csv.cell(k).cell(samples[k].real()).cell(samples[k].imag());
        for (const auto& p : prints) csv.cell(p[k]);
        csv.end();
    }
    Csv dist({"a", "b", "distance"});
    double least = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < prints.size(); ++a)
        for (std::size_t b = a + 1; b < prints.size(); ++b) {
            const double d = fingerprint_distance(prints[a], prints[b]);
            least = std::min(least, d);
            dist.cell(cols[3 + a]).cell(cols[3 + b]).cell(d).end();
        }
    run.write("fingerprints.csv", csv);
    run.write("fingerprint_distances.csv", dist);
    run.summary = {{"maps", mus.size()}, {"min_distance", least}};
    run.diag("maps=" + std::to_string(mus.size()) + " min_distance=" + num(least));
    return 0;
}

}  // namespace

int run_command(const std::string& command, const ExperimentConfig& cfg, std::ostream& diag) {
    static const std::map<std::string, int (*)(Run&)> table{
        {"tessellate", cmd_tessellate}, {"hororegions", cmd_hororegions},
        {"build", cmd_build},           {"verify", cmd_verify},
        {"curvature-scan", cmd_curvature_scan}, {"sweep", cmd_sweep},
        {"fingerprint", cmd_fingerprint}};
    const auto it = table.find(command);
    if (it == table.end()) {
        diag << "cmd=" << command << " error=config msg=\"unknown command\"\n";
        return 2;
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        diag << "cmd=" << command << " error=config msg=\"" << e.what() << "\"\n";
        return 2;
    }
    Run run(cfg, command, diag);
    try {
        const int code = it->second(run);
        run.finish(code == 0 ? "ok" : "check-failed", code);
        return code;
    } catch (const ConfigError& e) {
        run.diag(std::string("error=config msg=\"") + e.what() + "\"");
        run.finish("config-error", 2);
        return 2;
    } catch (const Error& e) {
        run.diag("error=" + e.kind() + " msg=\"" + e.what() + "\"");
        run.finish("error", 1);
        return 1;
    }
}

}  // namespace homogh
