// reebfol: command-line front end.
//
// Exit status: 0 PASS, 1 FAIL, 2 INCONCLUSIVE, 3 usage or input error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reebfol/brownian.hpp"
#include "reebfol/contact.hpp"
#include "reebfol/instances.hpp"
#include "reebfol/io.hpp"
#include "reebfol/logdiffusion.hpp"
#include "reebfol/obstruction.hpp"
#include "reebfol/parallel.hpp"
#include "svg.hpp"

using namespace reebfol;

namespace {

constexpr int kUsage = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    // inputs
    std::string instance, chart, measure, complex;
    int resolution = 0;
    // estimator parameters; unset ones fall back to the instance's recorded values
    double T = 1.0, dt = 1e-3, R = std::numeric_limits<double>::infinity(), S = 2.0;
    std::size_t paths = 1000;
    double margin = 0.0, eps = 1e-2, se_tol = std::numeric_limits<double>::infinity();
    bool auto_eps = false, from_measure = false;
    std::string diffuse = "auto";
    int levels = 3, slice = 0;
    std::string params_file;
    // simulate
    std::string quantity = "contraction";
    std::vector<double> start;
    double z = 0.0;
    int buckets = 20;
    double fit_start = 0.2;
    // output
    std::string out;
    std::vector<std::string> formats{"json"};
    // global
    std::optional<std::uint64_t> seed;
    int threads = 1;
    // instances
    std::vector<std::string> names;
};

int verdict_code(std::initializer_list<Verdict> vs) {
    bool inconclusive = false;
    for (Verdict v : vs) {
        if (v == Verdict::Fail) return 1;
        inconclusive = inconclusive || v == Verdict::Inconclusive;
    }
    return inconclusive ? 2 : 0;
}

std::string timestamp() {
    const std::time_t t = std::time(nullptr);
    char b[32];
    std::strftime(b, sizeof b, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return b;
}

class Run {
public:
    Run(std::string sub, Options& o) : sub_(std::move(sub)), o_(o), t0_(std::chrono::steady_clock::now()) {}

    bool given(const CLI::App* app, const std::string& name) const {
        const auto* opt = app->get_option_no_throw(name);
        return opt && opt->count() > 0;
    }
    bool wants(const std::string& f) const {
        for (const auto& x : o_.formats)
            if (x == f) return true;
        return false;
    }

    // Loads the instance (or chart + measure files); returns a canonical description for the config hash.
    json load(bool need_measure = true) {
        json src;
        if (!o_.instance.empty()) {
            const auto& names = instance_names();
            if (std::find(names.begin(), names.end(), o_.instance) != names.end()) {
                d_ = std::make_unique<InstanceDescriptor>(make_instance(o_.instance, o_.resolution));
                src["instance"] = o_.instance;
                src["resolution"] = d_->resolution;
            } else if (std::filesystem::exists(o_.instance)) {
                const json j = read_json(o_.instance);
                d_ = std::make_unique<InstanceDescriptor>(instance_from_json(j));
                src["instance_file"] = hex64(fnv1a64(dump(j)));
            } else {
                throw UsageError("unknown instance '" + o_.instance + "' (see `reebfol instances list`)");
            }
        } else if (!o_.chart.empty()) {
            const json j = read_json(o_.chart);
            FoliatedChart c = chart_from_json(j);
            if (o_.measure.empty() && need_measure) throw UsageError("--chart needs --measure");
            auto tau = TransverseMeasureField::constant(c);
            d_ = std::make_unique<InstanceDescriptor>(
                InstanceDescriptor{"custom", "", std::move(c), std::move(tau), ExpectedProperties{}, 0, 0.0, {}});
            src["chart_file"] = hex64(fnv1a64(dump(j)));
        } else {
            throw UsageError("one of --instance or --chart is required");
        }
        if (!o_.measure.empty()) {
            const json j = read_json(o_.measure);
            d_->tau = measure_from_json(j, d_->chart);
            src["measure_file"] = hex64(fnv1a64(dump(j)));
        }
        return src;
    }

    void require_seed() const {
        if (!o_.seed) throw UsageError("--seed is required for `" + sub_ + "`");
    }

    // Fills diffusion parameters not given on the command line from --params, then from the instance record.
    void resolve_diffusion(const CLI::App* app) {
        const RecordedDiffusion rd = d_ ? d_->expected.diffusion : RecordedDiffusion{};
        json pf;
        if (!o_.params_file.empty()) pf = read_json(o_.params_file);
        auto pick = [&](const char* flag, const char* key, auto& field, auto recorded) {
            if (given(app, flag)) return;
            if (pf.contains(key) && !pf.at(key).is_null())
                field = pf.at(key).get<std::decay_t<decltype(field)>>();
            else
                field = recorded;
        };
        pick("-T", "T", o_.T, rd.T);
        pick("--dt", "dt", o_.dt, rd.dt);
        pick("--paths", "paths", o_.paths, rd.n_paths);
        pick("-R", "R", o_.R, rd.R);
        pick("-S", "S", o_.S, rd.S);
        pick("--margin", "margin", o_.margin, 0.0);
        if (!o_.seed && pf.contains("seed")) o_.seed = pf.at("seed").get<std::uint64_t>();
        if (!(o_.T > 0) || !(o_.dt > 0) || o_.dt > o_.T || o_.paths == 0) throw UsageError("need 0 < dt <= T and paths > 0");
        if (!(o_.R > 0) || !(o_.S > 1)) throw UsageError("need R > 0 and S > 1");
    }

    json diffusion_params() const {
        return {{"T", o_.T}, {"dt", o_.dt}, {"paths", o_.paths}, {"R", std::isfinite(o_.R) ? json(o_.R) : json("inf")},
                {"S", o_.S}, {"se_tolerance", std::isfinite(o_.se_tol) ? json(o_.se_tol) : json(nullptr)}};
    }

    DiffusionParams diffusion() const {
        return {o_.T, o_.dt, o_.paths, CutoffSpec(o_.R, o_.S), *o_.seed, o_.se_tol};
    }

    json report(const json& inputs, const json& params) {
        config_ = {{"subcommand", sub_}, {"inputs", inputs}, {"params", params},
                   {"seed", o_.seed ? json(*o_.seed) : json(nullptr)}};
        return {{"schema_version", kReportSchemaVersion},
                {"subcommand", sub_},
                {"config", config_},
                {"config_hash", hex64(fnv1a64(dump(config_)))},
                {"seed", config_["seed"]}};
    }

    void file(const std::string& name, const std::string& text) {
        if (o_.out.empty()) return;
        write_text(std::filesystem::path(o_.out) / name, text);
    }

    // Prints the report and writes it with its sidecar.
    void emit(const std::string& stem, const json& rep) {
        const std::string text = dump(rep);
        std::cout << text;
        if (o_.out.empty()) return;
        if (wants("json")) file(stem + ".json", text);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        file(stem + ".meta.json", dump({{"config_hash", rep.at("config_hash")},
                                        {"threads", threads()},
                                        {"timestamp", timestamp()},
                                        {"wall_seconds", secs}}));
    }

    InstanceDescriptor& inst() { return *d_; }

private:
    std::string sub_;
    Options& o_;
    std::chrono::steady_clock::time_point t0_;
    std::unique_ptr<InstanceDescriptor> d_;
    json config_;
};

json estimator_json(const EstimatorReport& r) {
    json ex = json::object();
    for (const auto& [k, v] : r.extras) ex[k] = v;
    json b = json::array();
    for (const auto& t : r.buckets) b.push_back({{"t", t.t}, {"mean", t.mean}, {"se", t.se}});
    return {{"quantity", r.quantity},   {"estimate", r.estimate},     {"se", r.se},
            {"n_paths", r.n_paths},     {"n_truncated", r.n_truncated}, {"truncation_warning", r.truncation_warning},
            {"extras", ex},             {"buckets", b}};
}

std::string buckets_csv(const EstimatorReport& r) {
    std::ostringstream s;
    s.precision(17);
    s << "t,mean,se\n";
    for (const auto& b : r.buckets) s << b.t << "," << b.mean << "," << b.se << "\n";
    return s.str();
}

json superharmonic_json(const SuperharmonicReport& s) {
    return {{"verdict", to_string(s.verdict)}, {"margin", s.margin},       {"checked", s.checked},
            {"passed", s.passed},              {"failed", s.failed},       {"inconclusive", s.inconclusive},
            {"worst_node", s.worst_node},      {"worst_laplacian", s.worst_laplacian}, {"worst_se", s.worst_se}};
}

std::string nodes_csv(const FoliatedChart& c, const std::vector<std::string>& cols,
                      const std::vector<const std::vector<double>*>& data) {
    std::ostringstream s;
    s.precision(17);
    s << "node,i,j,k,x,y,z";
    for (const auto& n : cols) s << "," << n;
    s << "\n";
    for (int k = 0; k < c.nz(); ++k)
        for (int j = 0; j < c.ny(); ++j)
            for (int i = 0; i < c.nx(); ++i) {
                const std::size_t n = c.node_index(i, j, k);
                s << n << "," << i << "," << j << "," << k << "," << c.x_at(i) << "," << c.y_at(j) << "," << c.z_at(k);
                for (const auto* d : data) {
                    s << ",";
                    if (d && n < d->size() && std::isfinite((*d)[n])) s << (*d)[n];
                }
                s << "\n";
            }
    return s.str();
}

struct ContactStage {
    double eps = 0.0;
    std::string eps_source;
    ContactVolume volume;
    TransverseReport transverse;
    OneForm3 beta;
    Verdict contact = Verdict::Fail;
};

ContactStage contact_stage(const FoliatedChart& c, const TransverseMeasureField& tau, const Options& o, bool fixed) {
    ContactStage s;
    if (fixed) {
        s.eps = o.eps;
        s.eps_source = "fixed";
    } else if (auto e = auto_epsilon(c, tau)) {
        s.eps = *e;
        s.eps_source = "auto";
    } else {
        // no dyadic eps works; report the failure at the requested eps
        s.eps = o.eps;
        s.eps_source = "auto-failed";
    }
    s.beta = build_beta(c, tau);
    s.volume = contact_volume(c, tau, s.beta, s.eps);
    s.transverse = check_reeb_transverse(c, tau, s.eps);
    s.contact = s.volume.positive ? Verdict::Pass : Verdict::Fail;
    return s;
}

json contact_json(const ContactStage& s) {
    const auto& v = s.volume;
    const auto& t = s.transverse;
    json j{{"eps", s.eps},
           {"eps_source", s.eps_source},
           {"contact",
            {{"verdict", to_string(s.contact)},
             {"positive", v.positive},
             {"min_direct", v.min_direct},
             {"argmin", v.argmin},
             {"max_disagreement", v.max_disagreement}}},
           {"transverse",
            {{"verdict", to_string(t.verdict)},
             {"min_dalpha_sigma", t.min_dalpha_sigma},
             {"min_tau_R", t.min_tau_R},
             {"worst_node", t.worst_node},
             {"criteria_agree", t.criteria_agree},
             {"degenerate", t.degenerate}}}};
    if (t.verdict == Verdict::Fail) j["transverse"]["message"] = "Reeb field is not transverse to the leaves";
    return j;
}

// Kernel of alpha on the leaf: alpha|leaf = eps beta, so the line field is (-beta_y, beta_x).
std::string direction_svg(const FoliatedChart& c, const OneForm3& beta, int slice, double eps) {
    std::vector<double> dx(beta.y.size()), dy(beta.x.size());
    for (std::size_t n = 0; n < dx.size(); ++n) {
        dx[n] = -beta.y[n];
        dy[n] = beta.x[n];
    }
    return svg::line_field(c, dx, dy, slice, "characteristic foliation, slice " + std::to_string(slice) + ", eps " + svg::fmt(eps));
}

struct LPStage {
    LeafComplex complex;
    std::string source;
    LPOutcome outcome;
    bool verified = false;
};

LPStage lp_stage(Run& run, const Options& o, const TransverseMeasureField& tau) {
    LPStage s;
    auto& d = run.inst();
    if (!o.complex.empty()) {
        s.complex = complex_from_json(read_json(o.complex));
        s.source = "file";
    } else if (d.complex && !o.from_measure) {
        s.complex = *d.complex;
        s.source = "instance";
    } else {
        if (o.slice < 0 || o.slice >= d.chart.nz()) throw UsageError("--slice out of range");
        const auto& lf = tau.log_values();
        const auto first = lf.begin() + static_cast<std::ptrdiff_t>(o.slice * d.chart.leaf_nodes());
        const auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(d.chart.leaf_nodes()));
        // a constant measure has no level curves
        if (o.levels == 0 || *lo == *hi) {
            s.complex = grid_complex(d.chart, o.slice);
            s.source = "grid";
        } else {
            s.complex = extract_complex(d.chart, tau, o.slice, o.levels);
            s.source = "measure";
        }
    }
    s.outcome = solve_beta_lp(s.complex);
    s.verified = verify_certificate(s.outcome, s.complex);
    return s;
}

json lp_json(const LPStage& s) {
    return {{"complex", {{"source", s.source}, {"faces", s.complex.faces()}, {"edges", s.complex.edges()},
                         {"marked", s.complex.marked()}}},
            {"outcome", outcome_to_json(s.outcome)},
            {"verified", s.verified}};
}

Verdict lp_verdict(const LPStage& s) {
    if (!s.verified) return Verdict::Inconclusive;
    return s.outcome.kind == LPOutcome::Kind::FeasibleBeta ? Verdict::Pass : Verdict::Fail;
}

// ---- subcommands ----

int cmd_simulate(Options& o, const CLI::App* app) {
    Run run("simulate", o);
    const json src = run.load();
    run.require_seed();
    run.resolve_diffusion(app);
    auto& d = run.inst();
    StartSpec start = StartSpec::uniform(o.z);
    if (!o.start.empty()) {
        if (o.start.size() != 2) throw UsageError("--start takes two numbers x y");
        start = StartSpec::point({o.start[0], o.start[1]}, o.z);
        if (!d.chart.contains(start.p)) throw UsageError("--start lies outside the leaf domain");
    }
    const PathParams pp{o.T, o.dt, o.paths, *o.seed, start};
    json params{{"quantity", o.quantity}, {"T", o.T}, {"dt", o.dt}, {"paths", o.paths}, {"z", o.z},
                {"start", o.start.empty() ? json("uniform") : json(o.start)}};
    if (o.quantity == "contraction" || o.quantity == "drift") {
        params["buckets"] = o.buckets;
        params["fit_start"] = o.fit_start;
    }
    json rep = run.report(src, params);
    std::string csv;
    if (o.quantity == "contraction" || o.quantity == "drift") {
        const auto [k, dr] = estimate_contraction_and_drift(d.chart, d.tau, {pp, o.buckets, o.fit_start});
        rep["contraction"] = estimator_json(k);
        rep["drift"] = estimator_json(dr);
        csv = buckets_csv(k);
    } else if (o.quantity == "moments") {
        const auto r2 = diffuse(d.chart, [](const WalkerState& w) { return w.cover.dot(w.cover); }, pp);
        const auto x2 = diffuse(d.chart, [](const WalkerState& w) { return w.cover.x * w.cover.x; }, pp);
        rep["squared_displacement"] = estimator_json(r2);
        rep["squared_x_displacement"] = estimator_json(x2);
    } else if (o.quantity == "stationary") {
        StationaryParams sp;
        sp.paths = pp;
        sp.fit_start = o.fit_start;
        const auto s = estimate_stationary(d.chart, sp);
        rep["stationary"] = {{"bins_x", s.bins_x}, {"bins_y", s.bins_y}, {"bins_z", s.bins_z},
                             {"leaf_mass", s.leaf_mass}, {"leaf_se", s.leaf_se}, {"z_mass", s.z_mass},
                             {"z_se", s.z_se}, {"n_paths", s.n_paths}, {"n_truncated", s.n_truncated},
                             {"truncation_warning", s.truncation_warning}};
    } else {
        throw UsageError("unknown --quantity '" + o.quantity + "'");
    }
    run.emit("simulate", rep);
    if (!csv.empty() && run.wants("csv")) run.file("simulate_buckets.csv", csv);
    return 0;
}

int cmd_diffuse(Options& o, const CLI::App* app) {
    Run run("diffuse", o);
    const json src = run.load();
    run.require_seed();
    run.resolve_diffusion(app);
    auto& d = run.inst();
    json params = run.diffusion_params();
    params["margin"] = o.margin;
    json rep = run.report(src, params);
    const auto r = log_diffuse(d.chart, d.tau, run.diffusion());
    const auto sh = check_superharmonic(d.chart, r.field, o.margin);
    rep["diffusion"] = {{"max_exponent_se", r.max_exponent_se}, {"certified", r.certified},
                        {"n_truncated", r.n_truncated}, {"undefined_laplacian_samples", r.undefined_laplacian_samples}};
    rep["superharmonic"] = superharmonic_json(sh);
    const Verdict v = r.certified ? sh.verdict : Verdict::Inconclusive;
    rep["verdict"] = to_string(v);
    run.emit("diffuse", rep);
    run.file("measure.json", dump(measure_to_json(r.field)));
    const auto& ch = *r.field.channels();
    if (run.wants("csv"))
        run.file("diffuse_nodes.csv", nodes_csv(d.chart, {"log_f", "exponent_se", "laplacian", "laplacian_se"},
                                                {&r.field.log_values(), &ch.exponent_se, &ch.laplacian, &ch.laplacian_se}));
    if (run.wants("svg"))
        run.file("laplacian.svg", svg::heat_map(d.chart, ch.laplacian, o.slice, "Laplacian of log f', slice " + std::to_string(o.slice)));
    return verdict_code({v});
}

int cmd_check_contact(Options& o, const CLI::App* app) {
    Run run("check-contact", o);
    const json src = run.load();
    auto& d = run.inst();
    const bool fixed = app->count("--eps") > 0 && !o.auto_eps;
    if (fixed && !(o.eps > 0)) throw UsageError("--eps must be positive");
    json params{{"eps", fixed ? json(o.eps) : json("auto")}, {"slice", o.slice}};
    json rep = run.report(src, params);
    const auto s = contact_stage(d.chart, d.tau, o, fixed);
    rep.update(contact_json(s));
    const Verdict v = s.contact == Verdict::Fail ? Verdict::Fail : s.transverse.verdict;
    rep["verdict"] = to_string(v);
    run.emit("check-contact", rep);
    if (run.wants("csv"))
        run.file("contact_volume.csv", nodes_csv(d.chart, {"direct", "expansion"}, {&s.volume.direct, &s.volume.expansion}));
    if (run.wants("svg")) {
        if (o.slice < 0 || o.slice >= d.chart.nz()) throw UsageError("--slice out of range");
        run.file("characteristic.svg", direction_svg(d.chart, s.beta, o.slice, s.eps));
    }
    return verdict_code({v});
}

int cmd_check_obstruction(Options& o, const CLI::App*) {
    Run run("check-obstruction", o);
    json src;
    if (!o.complex.empty() && o.instance.empty() && o.chart.empty()) {
        src["complex_file"] = hex64(fnv1a64(dump(read_json(o.complex))));
        // a complex file alone needs no chart
        LPStage s;
        s.complex = complex_from_json(read_json(o.complex));
        s.source = "file";
        s.outcome = solve_beta_lp(s.complex);
        s.verified = verify_certificate(s.outcome, s.complex);
        json rep = run.report(src, json::object());
        rep.update(lp_json(s));
        rep["verdict"] = to_string(lp_verdict(s));
        run.emit("check-obstruction", rep);
        return verdict_code({lp_verdict(s)});
    }
    src = run.load();
    if (!o.complex.empty()) src["complex_file"] = hex64(fnv1a64(dump(read_json(o.complex))));
    json params{{"from_measure", o.from_measure}, {"levels", o.levels}, {"slice", o.slice}};
    json rep = run.report(src, params);
    const auto s = lp_stage(run, o, run.inst().tau);
    rep.update(lp_json(s));
    rep["verdict"] = to_string(lp_verdict(s));
    run.emit("check-obstruction", rep);
    if (s.source != "file" && s.source != "instance") run.file("complex.json", dump(complex_to_json(s.complex)));
    return verdict_code({lp_verdict(s)});
}

int cmd_pipeline(Options& o, const CLI::App* app) {
    Run run("pipeline", o);
    const json src = run.load();
    auto& d = run.inst();
    // built-in instances whose measure is already superharmonic skip the diffusion stage
    const bool diffuse = o.diffuse == "always" || (o.diffuse == "auto" && (d.name == "custom" || d.expected.needs_diffusion));
    json params;
    if (diffuse) {
        run.require_seed();
        run.resolve_diffusion(app);
        params = run.diffusion_params();
    } else if (o.params_file.empty() == false) {
        run.resolve_diffusion(app);
    }
    const bool fixed = app->count("--eps") > 0 && !o.auto_eps;
    params["diffuse"] = diffuse;
    params["margin"] = o.margin;
    params["eps"] = fixed ? json(o.eps) : json("auto");
    params["levels"] = o.levels;
    params["from_measure"] = o.from_measure;
    json rep = run.report(src, params);

    LogDiffusionResult r{d.tau};
    if (diffuse) {
        r = log_diffuse(d.chart, d.tau, run.diffusion());
        rep["diffusion"] = {{"max_exponent_se", r.max_exponent_se}, {"certified", r.certified},
                            {"n_truncated", r.n_truncated}, {"undefined_laplacian_samples", r.undefined_laplacian_samples}};
    } else {
        rep["diffusion"] = nullptr;
    }
    const auto sh = check_superharmonic(d.chart, r.field, o.margin);
    const Verdict v_sh = r.certified ? sh.verdict : Verdict::Inconclusive;
    rep["superharmonic"] = superharmonic_json(sh);

    const auto cs = contact_stage(d.chart, r.field, o, fixed);
    rep["contact_stage"] = contact_json(cs);

    const auto lp = lp_stage(run, o, r.field);
    rep["lp"] = lp_json(lp);

    rep["chain"] = {{"superharmonic", to_string(v_sh)},
                    {"contact", to_string(cs.contact)},
                    {"transverse", to_string(cs.transverse.verdict)},
                    {"lp", to_string(lp.outcome.kind)}};
    const int code = verdict_code({v_sh, cs.contact, cs.transverse.verdict, lp_verdict(lp)});
    rep["verdict"] = code == 0 ? "PASS" : code == 1 ? "FAIL" : "INCONCLUSIVE";
    run.emit("pipeline", rep);
    run.file("measure.json", dump(measure_to_json(r.field)));
    if (run.wants("csv"))
        run.file("contact_volume.csv", nodes_csv(d.chart, {"direct", "expansion"}, {&cs.volume.direct, &cs.volume.expansion}));
    if (run.wants("svg")) {
        const auto lap = r.field.channels() ? r.field.channels()->laplacian : r.field.laplacian_log(d.chart);
        run.file("laplacian.svg", svg::heat_map(d.chart, lap, o.slice, "Laplacian of log f'"));
        run.file("characteristic.svg", direction_svg(d.chart, cs.beta, o.slice, cs.eps));
    }
    return code;
}

int cmd_instances_list() {
    for (const auto& n : instance_names()) std::cout << n << "\t" << make_instance(n).description << "\n";
    return 0;
}

int cmd_instances_export(Options& o) {
    if (o.names.empty()) throw UsageError("name at least one instance to export");
    for (const auto& n : o.names) {
        const auto& names = instance_names();
        if (std::find(names.begin(), names.end(), n) == names.end()) throw UsageError("unknown instance '" + n + "'");
        const std::string text = dump(instance_to_json(make_instance(n, o.resolution)));
        if (o.out.empty())
            std::cout << text;
        else
            write_text(std::filesystem::path(o.out) / (n + ".json"), text);
    }
    return 0;
}

void add_inputs(CLI::App* s, Options& o, bool measure = true) {
    s->add_option("--instance", o.instance, "built-in instance name or exported instance file");
    s->add_option("--chart", o.chart, "chart JSON file");
    if (measure) s->add_option("--measure", o.measure, "measure JSON file (overrides the instance measure)");
    s->add_option("--resolution", o.resolution, "cells per unit length for built-in instances (0: default)");
}

void add_outputs(CLI::App* s, Options& o) {
    s->add_option("--out", o.out, "output directory");
    s->add_option("--format", o.formats, "output formats")->delimiter(',')->check(CLI::IsMember({"json", "csv", "svg"}));
}

void add_diffusion(CLI::App* s, Options& o) {
    s->add_option("-T", o.T, "diffusion time");
    s->add_option("--dt", o.dt, "time step");
    s->add_option("--paths", o.paths, "paths per node");
    s->add_option("-R", o.R, "cutoff radius (inf disables)");
    s->add_option("-S", o.S, "cutoff spread factor (> 1)");
    s->add_option("--params", o.params_file, "JSON file with T, dt, paths, R, S, margin, seed");
    s->add_option("--se-tolerance", o.se_tol, "per-node exponent SE above which the run is uncertified");
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Reeb flows transverse to foliations: numerical checks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", o.seed, "master seed (required by stochastic subcommands)");
    app.add_option("--threads", o.threads, "worker threads (wall time only)")->check(CLI::PositiveNumber);

    auto* sim = app.add_subcommand("simulate", "leafwise Brownian estimators");
    add_inputs(sim, o);
    add_outputs(sim, o);
    add_diffusion(sim, o);
    sim->add_option("--quantity", o.quantity, "contraction | moments | stationary")
        ->check(CLI::IsMember({"contraction", "drift", "moments", "stationary"}));
    sim->add_option("--start", o.start, "start point x y (default: uniform)")->expected(2);
    sim->add_option("--z", o.z, "start height");
    sim->add_option("--buckets", o.buckets, "time buckets for the contraction fit");
    sim->add_option("--fit-start", o.fit_start, "fraction of T discarded before fitting");

    auto* dif = app.add_subcommand("diffuse", "log-diffusion and superharmonicity verdict");
    add_inputs(dif, o);
    add_outputs(dif, o);
    add_diffusion(dif, o);
    dif->add_option("--margin", o.margin, "require Lap log f' < -margin");
    dif->add_option("--slice", o.slice, "slice for the plot");

    auto* con = app.add_subcommand("check-contact", "contact condition and Reeb transversality");
    add_inputs(con, o);
    add_outputs(con, o);
    auto* eps_opt = con->add_option("--eps", o.eps, "fixed eps");
    con->add_flag("--auto-eps", o.auto_eps, "largest dyadic eps that works (default)")->excludes(eps_opt);
    con->add_option("--slice", o.slice, "slice for the plot");

    auto* obs = app.add_subcommand("check-obstruction", "exact LP alternative on a leaf complex");
    add_inputs(obs, o);
    add_outputs(obs, o);
    obs->add_option("--complex", o.complex, "complex JSON file");
    obs->add_flag("--from-measure", o.from_measure, "extract the complex from the measure's level sets");
    obs->add_option("--levels", o.levels, "level curves for extraction")->check(CLI::NonNegativeNumber);
    obs->add_option("--slice", o.slice, "slice for extraction");

    auto* pip = app.add_subcommand("pipeline", "diffuse, then contact, then LP");
    add_inputs(pip, o);
    add_outputs(pip, o);
    add_diffusion(pip, o);
    pip->add_option("--margin", o.margin, "superharmonicity margin");
    pip->add_option("--diffuse", o.diffuse, "auto (when the instance needs it) | always | never")
        ->check(CLI::IsMember({"auto", "always", "never"}));
    auto* peps = pip->add_option("--eps", o.eps, "fixed eps");
    pip->add_flag("--auto-eps", o.auto_eps, "largest dyadic eps that works (default)")->excludes(peps);
    pip->add_option("--complex", o.complex, "complex JSON file");
    pip->add_flag("--from-measure", o.from_measure, "extract the complex even when the instance has one");
    pip->add_option("--levels", o.levels, "level curves for extraction")->check(CLI::NonNegativeNumber);
    pip->add_option("--slice", o.slice, "slice for plots and extraction");

    auto* ins = app.add_subcommand("instances", "built-in instances");
    ins->require_subcommand(1);
    auto* ins_list = ins->add_subcommand("list", "names and descriptions");
    auto* ins_exp = ins->add_subcommand("export", "write instance files");
    ins_exp->add_option("names", o.names, "instance names");
    ins_exp->add_option("--resolution", o.resolution, "cells per unit length (0: default)");
    ins_exp->add_option("--out", o.out, "output directory (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }
    set_threads(o.threads);

    try {
        if (*sim) return cmd_simulate(o, sim);
        if (*dif) return cmd_diffuse(o, dif);
        if (*con) return cmd_check_contact(o, con);
        if (*obs) return cmd_check_obstruction(o, obs);
        if (*pip) return cmd_pipeline(o, pip);
        if (*ins_list) return cmd_instances_list();
        if (*ins_exp) return cmd_instances_export(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InstanceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return kUsage;
}
