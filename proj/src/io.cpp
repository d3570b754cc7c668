#include "reebfol/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "reebfol/expr.hpp"

namespace reebfol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<double>();
}

json vec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::vector<double> vec_from(const json& a) {
    std::vector<double> v;
    v.reserve(a.size());
    for (const auto& x : a) v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
    return v;
}

std::string rational(const mpq_class& q) { return q.get_num().get_str() + "/" + q.get_den().get_str(); }

mpq_class rational_from(const json& j) {
    if (!j.is_string()) throw FormatError("rational must be a string \"p/q\"");
    mpq_class q;
    if (q.set_str(j.get<std::string>(), 10) != 0) throw FormatError("bad rational '" + j.get<std::string>() + "'");
    if (q.get_den() == 0) throw FormatError("zero denominator in '" + j.get<std::string>() + "'");
    q.canonicalize();
    return q;
}

std::string exact(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

Verdict verdict_from(const std::string& s) {
    if (s == "PASS") return Verdict::Pass;
    if (s == "FAIL") return Verdict::Fail;
    if (s == "INCONCLUSIVE") return Verdict::Inconclusive;
    throw FormatError("unknown verdict '" + s + "'");
}

LPOutcome::Kind kind_from(const std::string& s) {
    if (s == to_string(LPOutcome::Kind::FeasibleBeta)) return LPOutcome::Kind::FeasibleBeta;
    if (s == to_string(LPOutcome::Kind::Obstruction)) return LPOutcome::Kind::Obstruction;
    throw FormatError("unknown LP outcome '" + s + "'");
}

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

json chart_to_json(const FoliatedChart& c) {
    const GridSpec& g = c.grid();
    json j;
    j["grid"] = {{"nx", g.nx}, {"ny", g.ny}, {"nz", g.nz}, {"hx", g.hx}, {"hy", g.hy},
                 {"hz", g.hz}, {"x0", g.x0}, {"y0", g.y0}, {"z0", g.z0}};
    j["sheets"] = c.sheets();
    j["z_period"] = c.z_period();
    const auto& m = c.metrics();
    bool uniform = true;
    for (const auto& q : m) uniform = uniform && q.g11 == m[0].g11 && q.g12 == m[0].g12 && q.g22 == m[0].g22;
    if (uniform) {
        j["metric"] = {{"g11", exact(m[0].g11)}, {"g12", exact(m[0].g12)}, {"g22", exact(m[0].g22)}};
    } else {
        json nodes = json::array();
        for (const auto& q : m) nodes.push_back({q.g11, q.g12, q.g22});
        j["metric"] = {{"nodes", nodes}};
    }
    json bd = json::array();
    for (const auto& s : c.boundary()) {
        json e{{"side", to_string(s.side)}, {"lo", num(s.lo)}, {"hi", num(s.hi)}, {"kind", to_string(s.kind)},
               {"label", s.label}};
        json br = json::array();
        for (const auto& b : s.branches)
            br.push_back({{"target", to_string(b.target)}, {"u_scale", b.u_scale}, {"u_shift", b.u_shift},
                          {"swap_sheet", b.swap_sheet}, {"z_lo", num(b.z_lo)}, {"z_hi", num(b.z_hi)},
                          {"z_scale", b.z_scale}, {"z_shift", b.z_shift}});
        e["branches"] = br;
        bd.push_back(e);
    }
    j["boundary"] = bd;
    return j;
}

FoliatedChart chart_from_json(const json& j) {
    return guarded("chart", [&] {
        const json& gj = j.at("grid");
        GridSpec g;
        g.nx = gj.at("nx").get<int>();
        g.ny = gj.at("ny").get<int>();
        g.nz = gj.value("nz", 1);
        g.hx = gj.at("hx").get<double>();
        g.hy = gj.at("hy").get<double>();
        g.hz = gj.value("hz", 1.0);
        g.x0 = gj.value("x0", 0.0);
        g.y0 = gj.value("y0", 0.0);
        g.z0 = gj.value("z0", 0.0);
        if (g.nx < 2 || g.ny < 2 || g.nz < 1) throw FormatError("chart: grid needs nx, ny >= 2 and nz >= 1");
        std::vector<Metric2> metric;
        const json& mj = j.at("metric");
        if (mj.contains("nodes")) {
            for (const auto& q : mj.at("nodes")) metric.push_back({q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>()});
        } else {
            const Expression g11(mj.at("g11").get<std::string>()), g12(mj.value("g12", std::string("0"))),
                g22(mj.at("g22").get<std::string>());
            metric = sample_metric(g, [&](double x, double y, double z) {
                return Metric2{g11(x, y, z), g12(x, y, z), g22(x, y, z)};
            });
        }
        std::vector<BoundarySegment> bd;
        for (const auto& e : j.at("boundary")) {
            BoundarySegment s;
            s.side = side_from_string(e.at("side").get<std::string>());
            s.lo = num_or(e, "lo", -kInf);
            s.hi = num_or(e, "hi", kInf);
            s.kind = boundary_kind_from_string(e.at("kind").get<std::string>());
            s.label = e.value("label", std::string());
            if (e.contains("branches"))
                for (const auto& b : e.at("branches")) {
                    GlueBranch gb;
                    gb.target = side_from_string(b.at("target").get<std::string>());
                    gb.u_scale = b.value("u_scale", 1.0);
                    gb.u_shift = b.value("u_shift", 0.0);
                    gb.swap_sheet = b.value("swap_sheet", false);
                    gb.z_lo = num_or(b, "z_lo", -kInf);
                    gb.z_hi = num_or(b, "z_hi", kInf);
                    gb.z_scale = b.value("z_scale", 1.0);
                    gb.z_shift = b.value("z_shift", 0.0);
                    s.branches.push_back(gb);
                }
            bd.push_back(std::move(s));
        }
        return FoliatedChart(g, std::move(metric), std::move(bd), j.value("sheets", 1), j.value("z_period", 0.0));
    });
}

json measure_to_json(const TransverseMeasureField& tau, bool with_channels) {
    json j{{"anchor", tau.anchor()}, {"regularity", tau.regularity()}, {"log_f", vec(tau.log_values())}};
    if (with_channels && tau.channels()) {
        const auto& ch = *tau.channels();
        j["channels"] = {{"exponent_se", vec(ch.exponent_se)}, {"grad_x", vec(ch.grad_x)},   {"grad_y", vec(ch.grad_y)},
                         {"laplacian", vec(ch.laplacian)},     {"laplacian_se", vec(ch.laplacian_se)}};
    }
    return j;
}

TransverseMeasureField measure_from_json(const json& j, const FoliatedChart& chart) {
    return guarded("measure", [&] {
        const std::size_t anchor = j.value("anchor", std::size_t{0});
        TransverseMeasureField tau;
        if (j.contains("log_f")) {
            const auto v = vec_from(j.at("log_f"));
            if (v.size() != chart.node_count())
                throw FormatError("measure: log_f has " + std::to_string(v.size()) + " entries, chart has " +
                                  std::to_string(chart.node_count()) + " nodes");
            tau = TransverseMeasureField(chart, v, anchor, j.value("regularity", std::string("C2")));
        } else if (j.contains("f")) {
            tau = TransverseMeasureField::from_expression(chart, Expression(j.at("f").get<std::string>()), anchor);
        } else {
            throw FormatError("measure: needs \"log_f\" or \"f\"");
        }
        if (j.contains("channels")) {
            const json& c = j.at("channels");
            auto get = [&](const char* k) { return c.contains(k) ? vec_from(c.at(k)) : std::vector<double>{}; };
            tau.set_channels({get("exponent_se"), get("grad_x"), get("grad_y"), get("laplacian"), get("laplacian_se")});
        }
        return tau;
    });
}

json complex_to_json(const LeafComplex& c) {
    json faces = json::array();
    for (std::size_t f = 0; f < c.faces(); ++f) {
        json b = json::array();
        for (auto [e, s] : c.face_edges[f]) b.push_back({e, s});
        faces.push_back({{"area", rational(c.area[f])}, {"boundary", b}});
    }
    json edges = json::array();
    for (std::size_t e = 0; e < c.edges(); ++e) {
        json x{{"mark", c.mark[e]}};
        if (!c.edge_vertices.empty()) x["vertices"] = {c.edge_vertices[e].first, c.edge_vertices[e].second};
        edges.push_back(x);
    }
    json verts = json::array();
    for (const auto& v : c.vertices) verts.push_back({v.x, v.y});
    return {{"faces", faces}, {"edges", edges}, {"vertices", verts}, {"levels", c.levels}};
}

LeafComplex complex_from_json(const json& j) {
    return guarded("complex", [&] {
        LeafComplex c;
        const json& edges = j.at("edges");
        bool geometry = !edges.empty();
        for (const auto& e : edges) {
            c.add_edge(e.value("mark", 0));
            if (e.contains("vertices"))
                c.edge_vertices.emplace_back(e.at("vertices").at(0).get<std::size_t>(), e.at("vertices").at(1).get<std::size_t>());
            else
                geometry = false;
        }
        if (!geometry) c.edge_vertices.clear();
        if (j.contains("vertices"))
            for (const auto& v : j.at("vertices")) c.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        for (const auto& f : j.at("faces")) {
            std::vector<std::pair<std::size_t, int>> b;
            for (const auto& x : f.at("boundary")) {
                const std::size_t e = x.at(0).get<std::size_t>();
                if (e >= c.edges()) throw FormatError("complex: face refers to edge " + std::to_string(e));
                b.emplace_back(e, x.at(1).get<int>());
            }
            c.add_face(rational_from(f.at("area")), std::move(b));
        }
        if (j.contains("levels")) c.levels = j.at("levels").get<std::vector<double>>();
        try {
            c.validate();
        } catch (const ComplexError& e) {
            throw FormatError(std::string("complex: ") + e.what());
        }
        return c;
    });
}

json outcome_to_json(const LPOutcome& o) {
    json j{{"outcome", to_string(o.kind)},
           {"reduced_rows", o.reduced_rows},
           {"reduced_columns", o.reduced_columns},
           {"pivots", o.pivots}};
    if (o.kind == LPOutcome::Kind::FeasibleBeta) {
        json b = json::array();
        for (const auto& q : o.beta) b.push_back(rational(q));
        j["beta"] = b;
        j["delta"] = rational(o.delta);
    } else {
        json w = json::array();
        for (const auto& q : o.weights) w.push_back(rational(q));
        j["weights"] = w;
    }
    return j;
}

json instance_to_json(const InstanceDescriptor& d) {
    const ExpectedProperties& e = d.expected;
    json ref = json::array();
    for (const auto& [k, v] : e.reference) ref.push_back({k, v});
    const RecordedDiffusion& rd = e.diffusion;
    json ex{{"invariant_measure", e.invariant_measure},
            {"needs_diffusion", e.needs_diffusion},
            {"transversality", to_string(e.transversality)},
            {"lp", to_string(e.lp)},
            {"kappa", e.kappa ? json(*e.kappa) : json(nullptr)},
            {"reference", ref},
            {"diffusion", {{"T", rd.T}, {"dt", rd.dt}, {"n_paths", rd.n_paths}, {"R", num(rd.R)}, {"S", rd.S}}}};
    return {{"name", d.name},
            {"description", d.description},
            {"resolution", d.resolution},
            {"collar", d.collar},
            {"chart", chart_to_json(d.chart)},
            {"measure", measure_to_json(d.tau)},
            {"expected", ex},
            {"complex", d.complex ? complex_to_json(*d.complex) : json(nullptr)}};
}

InstanceDescriptor instance_from_json(const json& j) {
    return guarded("instance", [&] {
        FoliatedChart chart = chart_from_json(j.at("chart"));
        TransverseMeasureField tau = measure_from_json(j.at("measure"), chart);
        ExpectedProperties e;
        const json& ex = j.at("expected");
        e.invariant_measure = ex.value("invariant_measure", false);
        e.needs_diffusion = ex.value("needs_diffusion", false);
        e.transversality = verdict_from(ex.at("transversality").get<std::string>());
        e.lp = kind_from(ex.at("lp").get<std::string>());
        if (ex.contains("kappa") && !ex.at("kappa").is_null()) e.kappa = ex.at("kappa").get<double>();
        if (ex.contains("reference"))
            for (const auto& r : ex.at("reference")) e.reference.emplace_back(r.at(0).get<std::string>(), r.at(1).get<double>());
        if (ex.contains("diffusion")) {
            const json& rd = ex.at("diffusion");
            e.diffusion = {rd.at("T").get<double>(), rd.at("dt").get<double>(), rd.at("n_paths").get<std::size_t>(),
                           num_or(rd, "R", kInf), rd.at("S").get<double>()};
        }
        std::optional<LeafComplex> complex;
        if (j.contains("complex") && !j.at("complex").is_null()) complex = complex_from_json(j.at("complex"));
        return InstanceDescriptor{j.at("name").get<std::string>(), j.value("description", std::string()),
                                  std::move(chart), std::move(tau), std::move(e), j.value("resolution", 0),
                                  j.value("collar", 0.0), std::move(complex)};
    });
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw FormatError("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(p.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw FormatError("cannot write " + p.string());
    out << text;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
    return s;
}

}  // namespace reebfol
