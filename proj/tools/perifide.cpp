#include "perifide/error.hpp"
#include "perifide/experiment.hpp"
#include "perifide/nystrom.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#ifndef PERIFIDE_CONFIG_DIR
#define PERIFIDE_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace perifide;

namespace {

std::optional<nlohmann::json> read_expectation(const fs::path& config)
{
    const fs::path p = config.parent_path() / "expect" / (config.stem().string() + ".json");
    if (!fs::exists(p)) return std::nullopt;
    std::ifstream is(p);
    return nlohmann::json::parse(is);
}

nlohmann::json acceptance_json(const std::vector<VerifyEntry>& v)
{
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : v) {
        nlohmann::json j = {{"path", e.path}, {"mode", e.mode}, {"pass", e.pass}};
        if (e.mode == "equals") {
            j["expected"] = nlohmann::json::parse(e.expected_text);
            j["measured"] = e.measured_text;
        } else {
            j["expected"] = e.expected;
            j["measured"] = e.measured;
            j["tol"] = e.tol;
        }
        a.push_back(j);
    }
    return a;
}

int run_one(const fs::path& config, const std::string& out, bool verbose_checks, int& failures)
{
    const ExperimentConfig c = load_config(config.string());
    const std::string dir = out.empty() ? c.output_dir : out;
    nlohmann::json report = run_experiment(c, dir);
    const auto expect = read_expectation(config);
    if (!expect) return 1;
    const auto checks = check_expectations(report, *expect);
    report["acceptance"] = acceptance_json(checks);
    std::ofstream(fs::path(dir) / "report.json") << report.dump(2) << '\n';
    for (const auto& e : checks) {
        if (!e.pass) ++failures;
        if (verbose_checks || !e.pass)
            std::printf("  %s %s %s expected %s measured %s%s\n", e.pass ? "ok  " : "FAIL", c.name.c_str(),
                        e.path.c_str(), e.expected_text.c_str(), e.measured_text.c_str(),
                        e.mode == "equals" ? ""
                                           : (" (" + e.mode + " " + std::to_string(e.tol) + ")").c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    if (const char* t = std::getenv("PERIFIDE_THREADS")) {
        const int n = std::atoi(t);
        if (n > 0) set_threads(n);
    }

    CLI::App app{"perifide: periodic solutions of integrodifference equations"};
    app.require_subcommand(1);

    std::string config, out;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config, "TOML experiment file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "output directory");

    std::string target = "all", config_dir = PERIFIDE_CONFIG_DIR, verify_out = "verify_out";
    auto* verify = app.add_subcommand("verify", "run bundled experiments against expectation files");
    verify->add_option("name", target, "experiment name or 'all'");
    verify->add_option("--configs", config_dir, "directory of bundled configs");
    verify->add_option("--out", verify_out, "output root");

    std::string kind = "midpoint";
    int n = 8;
    std::vector<double> interval{-1.0, 1.0};
    auto* rule = app.add_subcommand("rule", "print quadrature nodes and weights");
    rule->add_option("--kind", kind, "midpoint | trapezoidal | chebyshev2");
    rule->add_option("--n", n, "subinterval count");
    rule->add_option("--interval", interval, "a b")->expected(2);

    int modes = 0;
    auto* eigs = app.add_subcommand("eigs", "spectrum table of the trivial-branch operator");
    eigs->add_option("config", config, "TOML experiment file")->required()->check(CLI::ExistingFile);
    eigs->add_option("--modes", modes, "number of modes (default from config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const ExperimentConfig c = load_config(config);
            const std::string dir = out.empty() ? c.output_dir : out;
            int failures = 0;
            if (run_one(config, dir, false, failures) != 0) {
                std::printf("%s: wrote %s (no expectation file)\n", c.name.c_str(), dir.c_str());
                return 0;
            }
            std::printf("%s: wrote %s, %d expectation mismatch(es)\n", c.name.c_str(), dir.c_str(), failures);
            return 0;
        }
        if (*verify) {
            std::vector<fs::path> configs;
            if (target == "all") {
                for (const auto& e : fs::directory_iterator(config_dir))
                    if (e.path().extension() == ".toml") configs.push_back(e.path());
                std::sort(configs.begin(), configs.end());
            } else {
                configs.push_back(fs::path(config_dir) / (target + ".toml"));
                if (!fs::exists(configs.back())) throw Error("config", "no bundled config " + target);
            }
            int failures = 0, missing = 0;
            for (const auto& p : configs) {
                const std::string name = p.stem().string();
                const int rc = run_one(p, (fs::path(verify_out) / name).string(), true, failures);
                if (rc != 0) {
                    std::printf("  FAIL %s: missing expectation file\n", name.c_str());
                    ++missing;
                }
            }
            std::printf("verify: %zu experiment(s), %d mismatch(es), %d missing expectation(s)\n",
                        configs.size(), failures, missing);
            return failures + missing == 0 ? 0 : 1;
        }
        if (*rule) {
            const QuadratureRule r = build_rule(parse_rule_kind(kind), n, interval[0], interval[1]);
            std::printf("# %s n=%d N=%d [%g, %g]\n# node weight\n", kind.c_str(), n, r.size(), r.a, r.b);
            for (int j = 0; j < r.size(); ++j) std::printf("%.17g %.17g\n", r.nodes[j], r.weights[j]);
            return 0;
        }
        if (*eigs) {
            const ExperimentConfig c = load_config(config);
            const Model m = build_model(c);
            const double aL = c.model.kernel.kind == KernelKind::laplace ? c.model.kernel.a * c.L : 0.0;
            const auto rows = spectrum_table(m, modes > 0 ? modes : c.modes, aL);
            std::printf("i,lambda_i,alpha_i0,parity,g20,kind\n");
            for (const auto& r : rows)
                std::printf("%d,%.10g,%.10g,%s,%.10g,%s\n", r["i"].get<int>(), r["lambda_i"].get<double>(),
                            r["alpha_i0"].get<double>(), r["parity"].get<std::string>().c_str(),
                            r["g20"].get<double>(), r["kind"].get<std::string>().c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "perifide: %s\n", e.what());
        return 2;
    }
    return 0;
}
