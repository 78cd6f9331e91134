#include "perifide/experiment.hpp"

#include "perifide/error.hpp"

#include <toml.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace perifide {

Task parse_task(const std::string& s)
{
    if (s == "trivial-branch") return Task::trivial_branch;
    if (s == "continue") return Task::continuation;
    if (s == "classify") return Task::classify;
    if (s == "fold-hunt") return Task::fold_hunt;
    if (s == "table") return Task::table;
    throw std::invalid_argument("unknown task '" + s + "'");
}

std::string to_string(Task t)
{
    switch (t) {
    case Task::trivial_branch: return "trivial-branch";
    case Task::continuation: return "continue";
    case Task::classify: return "classify";
    case Task::fold_hunt: return "fold-hunt";
    case Task::table: return "table";
    }
    return "?";
}

namespace {

class Reader {
public:
    Reader(const toml::table& root, std::string source) : root_(root), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& key, const toml::node* n, const std::string& msg) const
    {
        std::ostringstream os;
        os << source_;
        if (n) os << ':' << n->source().begin.line;
        os << ": field '" << key << "' " << msg;
        throw Error("config", os.str());
    }

    const toml::node* node(const std::string& key) const
    {
        return root_.at_path(key).node();
    }

    template <class T>
    std::optional<T> opt(const std::string& key) const
    {
        const toml::node* n = node(key);
        if (!n) return std::nullopt;
        if constexpr (std::is_same_v<T, double>) {
            if (auto v = n->value<double>()) return *v;
            fail(key, n, "must be a number");
        } else if constexpr (std::is_same_v<T, int>) {
            if (n->is_integer()) return static_cast<int>(*n->value<int64_t>());
            fail(key, n, "must be an integer");
        } else {
            if (n->is_string()) return *n->value<std::string>();
            fail(key, n, "must be a string");
        }
    }

    template <class T>
    T get(const std::string& key, T def) const
    {
        return opt<T>(key).value_or(def);
    }

    template <class T>
    T req(const std::string& key) const
    {
        auto v = opt<T>(key);
        if (!v) fail(key, nullptr, "is required");
        return *v;
    }

    template <class E>
    E parse_enum(const std::string& key, E (*p)(const std::string&), const std::string& def) const
    {
        const std::string s = get<std::string>(key, def);
        try {
            return p(s);
        } catch (const std::invalid_argument& e) {
            fail(key, node(key), e.what());
        }
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> def) const
    {
        const toml::node* n = node(key);
        if (!n) return def;
        const toml::array* a = n->as_array();
        if (!a || a->empty()) fail(key, n, "must be a nonempty array of numbers");
        std::vector<double> out;
        for (const auto& x : *a) {
            auto v = x.value<double>();
            if (!v) fail(key, &x, "must contain numbers only");
            out.push_back(*v);
        }
        return out;
    }

private:
    const toml::table& root_;
    std::string source_;
};

double default_growth_param(GrowthKind g)
{
    return g == GrowthKind::allee ? 10.0 : 1.0;
}

void write_text(const fs::path& p, const std::string& s)
{
    std::ofstream os(p);
    if (!os) throw Error("io", "cannot write " + p.string());
    os << s;
}

nlohmann::json event_json(const BifurcationPoint& bp, const std::string& source)
{
    nlohmann::json j = to_json(bp);
    j["source"] = source;
    return j;
}

nlohmann::json tolerances(const ContinuationOptions& o)
{
    return {{"newton_residual", o.newton.tol},
            {"localization_test", o.localize_tol},
            {"indicator_zero_relative", 1e-6},
            {"critical_multiplier", 1e-4},
            {"crossing_margin", o.crossing_margin}};
}

ContinuationOptions contin_options(const ExperimentConfig& c)
{
    ContinuationOptions o;
    o.h = c.step;
    o.k_max = c.k_max;
    o.direction = c.direction;
    o.alpha_min = c.alpha_min;
    o.alpha_max = c.alpha_max;
    return o;
}

std::string diagram_rows(const Branch& b, int id)
{
    std::ostringstream os;
    os.precision(12);
    for (const auto& p : b.points)
        os << p.orbit.alpha << ' ' << p.total_population << ' ' << p.morse_index << ' '
           << (p.morse_index == 0 ? 1 : 0) << ' ' << id << '\n';
    return os.str();
}

const char* diagram_header = "# alpha total_population morse_index stable branch\n";

PeriodicOrbit seed_orbit(const ExperimentConfig& c, const Model& m)
{
    if (!c.seed_value) throw Error("config", c.name + ": task needs params.seed or params.from_mode");
    const Tuple u0 = repeat(Vec::Constant(m.size(), *c.seed_value), m.period());
    return solve_periodic(m, u0, c.alpha);
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source << ':' << e.source().begin.line << ": " << e.description();
        throw Error("config", os.str());
    }
    const Reader r(root, source);
    ExperimentConfig c;
    c.name = r.get<std::string>("name", fs::path(source).stem().string());
    c.task = r.parse_enum<Task>("task", parse_task, "trivial-branch");

    ModelSpec& m = c.model;
    m.kernel.kind = r.parse_enum<KernelKind>("model.kernel", parse_kernel_kind, "laplace");
    m.kernel.a = r.get<double>("model.a", 1.0);
    m.growth.kind = r.parse_enum<GrowthKind>("model.growth", parse_growth_kind, "beverton_holt");
    m.growth.param = r.get<double>("model.growth_param", default_growth_param(m.growth.kind));
    m.order = r.parse_enum<Order>("model.order", parse_order, "growth_then_dispersal");
    m.slot = r.parse_enum<Slot>("model.slot", parse_slot, "multiplicative");
    m.slot_coef = r.get<double>("model.slot_coef", 1.0);
    m.beta = r.numbers("model.beta", {1.0});
    if (auto th = r.opt<int>("model.theta0")) {
        if (*th < 1) r.fail("model.theta0", r.node("model.theta0"), "must be positive");
        if (m.beta.size() == 1) m.beta.assign(static_cast<std::size_t>(*th), m.beta[0]);
        if (static_cast<int>(m.beta.size()) != *th)
            r.fail("model.beta", r.node("model.beta"), "length must equal model.theta0");
    }
    for (double b : m.beta)
        if (!(b > 0)) r.fail("model.beta", r.node("model.beta"), "entries must be positive");
    c.L = r.get<double>("model.L", 2.0);
    if (!(c.L > 0)) r.fail("model.L", r.node("model.L"), "must be positive");
    if (!(m.kernel.a > 0)) r.fail("model.a", r.node("model.a"), "must be positive");

    const RuleKind rk = r.parse_enum<RuleKind>("rule.kind", parse_rule_kind, "chebyshev2");
    if (rk == RuleKind::pointmass) {
        m.rule = point_rule(r.get<double>("rule.x", 0.0));
    } else {
        const int n = r.get<int>("rule.n", 50);
        if (n < 4) r.fail("rule.n", r.node("rule.n"), "must be at least 4");
        m.rule = build_rule(rk, n, -c.L / 2, c.L / 2);
    }

    c.modes = r.get<int>("params.modes", 5);
    if (c.modes < 1) r.fail("params.modes", r.node("params.modes"), "must be positive");
    c.alpha_min = r.get<double>("params.alpha_min", c.alpha_min);
    c.alpha_max = r.get<double>("params.alpha_max", c.alpha_max);
    if (!(c.alpha_min < c.alpha_max))
        r.fail("params.alpha_max", r.node("params.alpha_max"), "must exceed params.alpha_min");
    c.alpha = r.get<double>("params.alpha", 0.0);
    c.seed_value = r.opt<double>("params.seed");
    c.from_mode = r.opt<int>("params.from_mode");
    c.switch_eps = r.get<double>("params.switch_eps", c.switch_eps);
    c.direction = r.get<int>("params.direction", 1) < 0 ? -1 : 1;
    c.step = r.get<double>("params.step", c.step);
    if (!(c.step > 0)) r.fail("params.step", r.node("params.step"), "must be positive");
    c.k_max = r.get<int>("params.k_max", c.k_max);
    c.output_dir = r.get<std::string>("output_dir", "out/" + c.name);
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw Error("config", "cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path);
}

Model build_model(const ExperimentConfig& c)
{
    return Model(c.model);
}

nlohmann::json spectrum_table(const Model& m, int count, double aL)
{
    const auto modes = classify_trivial_branch(m, count);
    std::vector<double> roots;
    if (aL > 0) roots = laplace_roots(aL, count);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& md : modes) {
        nlohmann::json j = {{"i", md.i},
                            {"lambda_i", md.lambda},
                            {"alpha_i0", md.alpha0},
                            {"parity", md.parity == 0 ? "even" : md.parity == 1 ? "odd" : "none"},
                            {"g20", md.point.ind.g20 ? md.point.ind.g20->value : 0.0},
                            {"kind", to_string(md.point.kind)},
                            {"criticality", md.point.criticality},
                            {"morse", md.point.morse}};
        if (!roots.empty()) {
            const double v = roots[static_cast<std::size_t>(md.i)];
            double prod = 1.0;
            for (int t = 0; t < m.period(); ++t) prod *= m.beta(t);
            j["alpha_i0_roots"] = (1 + v * v) / std::pow(prod, 1.0 / m.period());
        }
        rows.push_back(j);
    }
    return rows;
}

nlohmann::json run_experiment(const ExperimentConfig& c, const std::string& dir)
{
    fs::create_directories(dir);
    const fs::path out(dir);
    const Model m = build_model(c);
    const ContinuationOptions co = contin_options(c);
    nlohmann::json report = {{"schema_version", report_schema_version},
                             {"name", c.name},
                             {"task", to_string(c.task)},
                             {"model", to_json(c.model)},
                             {"L", c.L},
                             {"tolerances", tolerances(co)}};
    nlohmann::json events = nlohmann::json::array();

    auto write_spectrum = [&](const nlohmann::json& rows) {
        std::ostringstream os;
        os.precision(12);
        os << "i,lambda_i,alpha_i0,parity,g20,kind\n";
        for (const auto& r : rows)
            os << r["i"].get<int>() << ',' << r["lambda_i"].get<double>() << ','
               << r["alpha_i0"].get<double>() << ',' << r["parity"].get<std::string>() << ','
               << r["g20"].get<double>() << ',' << r["kind"].get<std::string>() << '\n';
        write_text(out / "spectrum.csv", os.str());
    };
    const double aL = c.model.kernel.kind == KernelKind::laplace ? c.model.kernel.a * c.L : 0.0;

    switch (c.task) {
    case Task::trivial_branch:
    case Task::table: {
        const nlohmann::json rows = spectrum_table(m, c.modes, aL);
        write_spectrum(rows);
        report["spectrum"] = rows;
        if (c.model.kernel.kind == KernelKind::gauss) {
            const auto [lo, hi] = gauss_radius_bounds(c.model.kernel.a, c.L);
            report["spectral_radius"] = {{"value", rows[0]["lambda_i"]}, {"lower", lo}, {"upper", hi}};
        }
        if (c.task == Task::table) break;
        for (const auto& r : rows)
            events.push_back({{"kind", r["kind"]},
                              {"alpha", r["alpha_i0"]},
                              {"criticality", r["criticality"]},
                              {"source", "trivial-branch"}});
        // trivial branch with its Morse index on a grid up to past the last critical value
        std::ostringstream os;
        os.precision(12);
        os << diagram_header;
        const double amax = 1.1 * rows.back()["alpha_i0"].get<double>();
        const int samples = 200;
        for (int k = 1; k <= samples; ++k) {
            const double a = amax * k / samples;
            const PeriodicOrbit o{m.period(), zeros(m.period(), m.size()), a, 0.0, 0};
            const int mi = floquet(m, o).morse_index;
            os << a << " 0 " << mi << ' ' << (mi == 0 ? 1 : 0) << " 0\n";
        }
        write_text(out / "diagram.dat", os.str());
        break;
    }
    case Task::classify: {
        const PeriodicOrbit o = seed_orbit(c, m);
        const BifurcationPoint bp = classify(m, o);
        report["point"] = event_json(bp, "classify");
        report["kind"] = to_string(bp.kind);
        report["criticality"] = bp.criticality;
        events.push_back(report["point"]);
        break;
    }
    case Task::continuation:
    case Task::fold_hunt: {
        PeriodicOrbit start;
        if (c.from_mode) {
            const KOperator K = build_K(m);
            const TrivialSpectrum s = k_spectrum(m, K, *c.from_mode + 1);
            const int i = *c.from_mode;
            const PeriodicOrbit o{m.period(), zeros(m.period(), m.size()), s.alpha0[i], 0.0, 0};
            const BifurcationPoint bp = classify(m, o);
            events.push_back(event_json(bp, "trivial-branch"));
            start = switch_branch(m, bp, c.switch_eps);
        } else {
            start = seed_orbit(c, m);
        }
        std::vector<Branch> branches{continue_branch(m, start, co)};
        // follow the first secondary bifurcation of the seeded branch
        if (c.task == Task::continuation && !c.from_mode) {
            for (const auto& e : branches[0].events) {
                if (!e.point) continue;
                const BifKind k = e.point->kind;
                if (k != BifKind::flip && k != BifKind::pitchfork && k != BifKind::transcritical) continue;
                const double eps = c.switch_eps * std::max(1.0, std::sqrt(pairing_theta(
                                                                   m.rule(), e.point->orbit.states,
                                                                   e.point->orbit.states)));
                ContinuationOptions o2 = co;
                o2.direction = 1;
                branches.push_back(continue_branch(m, switch_branch(m, *e.point, eps), o2));
                break;
            }
        }
        std::string diagram = diagram_header;
        nlohmann::json bjs = nlohmann::json::array();
        for (std::size_t k = 0; k < branches.size(); ++k) {
            const Branch& b = branches[k];
            write_branch_csv(b, (out / (k == 0 ? "branches.csv" : "branches_" + std::to_string(k) + ".csv")).string());
            if (k) diagram += "\n\n";
            diagram += diagram_rows(b, static_cast<int>(k));
            for (const auto& e : b.events) {
                nlohmann::json j = to_json(e);
                j["branch"] = k;
                if (e.point) {
                    j["kind"] = to_string(e.point->kind);
                    j["alpha"] = e.point->orbit.alpha;
                    j["criticality"] = e.point->criticality;
                }
                if (c.task == Task::fold_hunt && e.kind != EventKind::fold_detected) continue;
                events.push_back(j);
            }
            bjs.push_back({{"points", b.points.size()},
                           {"stop_reason", b.stop_reason},
                           {"aborted", b.aborted},
                           {"alpha_range", {b.points.front().orbit.alpha, b.points.back().orbit.alpha}},
                           {"theta", b.points.front().orbit.theta}});
        }
        write_text(out / "diagram.dat", diagram);
        report["branches"] = bjs;
        if (c.task == Task::fold_hunt) {
            for (const auto& e : events)
                if (e.contains("point")) {
                    report["kind"] = e["point"]["kind"];
                    report["criticality"] = e["point"]["criticality"];
                    report["alpha"] = e["point"]["alpha"];
                    break;
                }
            if (!report.contains("kind")) report["kind"] = "none";
        }
        break;
    }
    }
    // events without a localized point keep their bracket data only
    for (auto& e : events)
        if (!e.contains("kind") && e.contains("event")) e["kind"] = e["event"];
    report["events"] = events;
    write_text(out / "events.json", events.dump(2) + "\n");
    write_text(out / "report.json", report.dump(2) + "\n");
    return report;
}

std::vector<VerifyEntry> check_expectations(const nlohmann::json& report, const nlohmann::json& expect)
{
    std::vector<VerifyEntry> out;
    for (const auto& ch : expect.at("checks")) {
        VerifyEntry v;
        v.path = ch.at("path").get<std::string>();
        const nlohmann::json::json_pointer ptr(v.path);
        const bool present = report.contains(ptr);
        if (ch.contains("equals")) {
            v.mode = "equals";
            v.expected_text = ch["equals"].dump();
            v.measured_text = present ? report.at(ptr).dump() : "<missing>";
            v.pass = present && report.at(ptr) == ch["equals"];
        } else {
            v.expected = ch.at("value").get<double>();
            v.mode = ch.contains("rel") ? "rel" : "abs";
            v.tol = ch.contains("rel") ? ch["rel"].get<double>() : ch.at("abs").get<double>();
            if (present && report.at(ptr).is_number()) {
                v.measured = report.at(ptr).get<double>();
                const double err = std::abs(v.measured - v.expected);
                v.pass = v.mode == "rel" ? err <= v.tol * std::abs(v.expected) : err <= v.tol;
            }
            std::ostringstream e, m;
            e.precision(10);
            m.precision(10);
            e << v.expected;
            if (present) m << report.at(ptr).dump();
            else m << "<missing>";
            v.expected_text = e.str();
            v.measured_text = m.str();
        }
        out.push_back(v);
    }
    return out;
}

} // namespace perifide
