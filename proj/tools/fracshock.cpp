#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracshock/config.hpp"
#include "fracshock/entropy_check.hpp"
#include "fracshock/estimates.hpp"
#include "fracshock/selftest.hpp"
#include "fracshock/solver.hpp"

namespace fs = std::filesystem;
using namespace fracshock;
using nlohmann::json;

namespace {

constexpr const char* version = "1.0.0";

enum Exit { ok = 0, failed = 1, bad_input = 2, runtime_failure = 3 };

void error_record(const std::string& kind, const std::vector<std::string>& messages)
{
    std::cerr << json{{"error", kind}, {"messages", messages}}.dump() << '\n';
}

struct Outcome {
    json report;
    bool pass = false;
    std::function<void(std::ostream&)> csv;
};

struct Context {
    RunConfig cfg;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    fs::path out;

    std::vector<std::uint64_t> seeds() const { return cfg.seeds(seed); }
    RunOptions run_options() const { return {threads, cfg.snapshots}; }
};

template <class Report>
std::function<void(std::ostream&)> csv_of(Report r)
{
    return [r = std::move(r)](std::ostream& os) { write_csv(os, r); };
}

Outcome cmd_simulate(const Context& ctx)
{
    const Problem p = ctx.cfg.make_problem();
    const Solver s(p, ctx.cfg.solver);
    const auto times = uniform_times(ctx.cfg.solver.t_end, ctx.cfg.snapshots);
    const auto seeds = ctx.seeds();
    const std::vector<std::pair<std::string, Functional>> fs{
        {"mass", total_mass}, {"l1", l1_norm}, {"l2_sq", l2_norm_sq}, {"tv", total_variation}};
    const auto e = run_ensemble(s, seeds, times, fs, ctx.threads);

    const std::size_t n_fields = std::min(ctx.cfg.field_paths, seeds.size());
    json field_files = json::array();
    for (std::size_t i = 0; i < n_fields; ++i) {
        const auto traj = Solver(s).run(seeds[i], times);
        const std::string name = "fields_" + std::to_string(seeds[i]) + ".csv";
        std::ofstream f(ctx.out / name, std::ios::binary);
        write_csv(f, traj, p.grid);
        field_files.push_back(name);
    }

    json funcs;
    for (std::size_t k = 0; k < e.names.size(); ++k)
        funcs[e.names[k]] = {{"mean", e.mean[k]}, {"se", e.se[k]}};
    Outcome o;
    o.pass = true;
    o.report = {{"kind", "simulate"},      {"n_paths", e.n_paths},         {"dt", s.dt()},
                {"n_steps", s.n_steps()},  {"stability_bound", s.stability_bound()},
                {"times", e.times},        {"functionals", funcs},         {"field_files", field_files},
                {"pass", true}};
    o.csv = [e](std::ostream& os) {
        os << "t,functional,mean,se\n";
        for (std::size_t k = 0; k < e.names.size(); ++k)
            for (std::size_t t = 0; t < e.times.size(); ++t)
                os << format_double(e.times[t]) << ',' << e.names[k] << ',' << format_double(e.mean[k][t]) << ','
                   << format_double(e.se[k][t]) << '\n';
    };
    return o;
}

Outcome cmd_entropy(const Context& ctx)
{
    const Solver s(ctx.cfg.make_problem(), ctx.cfg.solver);
    const auto rep = entropy_residual(s, ctx.seeds(), ctx.cfg.entropy_spec(s), ctx.threads);
    return {to_json(rep), rep.pass, csv_of(rep)};
}

Outcome cmd_contraction(const Context& ctx)
{
    const Problem p = ctx.cfg.make_problem();
    const Field v0 = ctx.cfg.v0.sample(p.grid);
    const auto rep = l1_contraction(p, v0, ctx.cfg.solver, ctx.seeds(), ctx.cfg.contraction_tol, ctx.run_options());
    return {to_json(rep), rep.pass, csv_of(rep)};
}

Outcome cmd_viscosity_rate(const Context& ctx)
{
    const auto fit = viscosity_rate(ctx.cfg.make_problem(), ctx.cfg.solver, ctx.cfg.eps_list, ctx.seeds(),
                                    ctx.cfg.rate_options(), ctx.run_options());
    return {to_json(fit), fit.pass, csv_of(fit)};
}

Outcome cmd_cont_dep(const Context& ctx)
{
    const Problem p = ctx.cfg.make_problem();
    RateOptions ro = ctx.cfg.rate_options();
    ro.ci_floor = -std::numeric_limits<double>::infinity();
    const auto fit = continuous_dependence(p, tanh_family(p.diffusion, ctx.cfg.cd_deltas), ctx.cfg.solver,
                                           ctx.seeds(), ro, ctx.run_options());
    return {to_json(fit), fit.pass, csv_of(fit)};
}

Outcome cmd_energy(const Context& ctx)
{
    const auto rep = viscous_estimates(ctx.cfg.make_problem(), ctx.cfg.solver, ctx.cfg.eps_list, ctx.seeds(),
                                       ctx.run_options(), ctx.cfg.viscous_limits());
    return {to_json(rep), rep.pass(), csv_of(rep)};
}

Outcome cmd_selftest(const Context& ctx)
{
    const auto rep = run_selftest(ctx.threads);
    return {to_json(rep), rep.pass(), [rep](std::ostream& os) {
                os << "name,value,relation,limit,pass\n";
                for (const auto& i : rep.items)
                    os << '"' << i.name << "\"," << format_double(i.value) << ',' << i.relation << ','
                       << format_double(i.limit) << ',' << (i.pass ? 1 : 0) << '\n';
            }};
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f)
        throw std::runtime_error("cannot write '" + path.string() + "'");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic fractional degenerate conservation law solver and estimate harness"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<std::size_t> threads_flag;
    std::string out_flag;
    app.add_option("--config", config_path, "Config file with 'section.key = value' lines")->check(CLI::ExistingFile);
    app.add_option("--seed", seed_flag, "Base seed; path i uses seed + i");
    app.add_option("--threads", threads_flag, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out_flag, "Output directory (fallback: FRACSHOCK_OUT)");

    using Handler = Outcome (*)(const Context&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands{
        {"simulate", "Run the ensemble and export fields and functionals", cmd_simulate},
        {"entropy-check", "Evaluate the entropy inequality residual", cmd_entropy},
        {"contraction", "Coupled L1 contraction between u0 and v0", cmd_contraction},
        {"viscosity-rate", "Vanishing-viscosity rate fit", cmd_viscosity_rate},
        {"cont-dep", "Continuous dependence on the diffusion nonlinearity", cmd_cont_dep},
        {"energy", "TV, L1 and energy bounds over the epsilon sweep", cmd_energy},
        {"selftest", "Fast invariant suite", cmd_selftest},
    };
    for (const auto& [name, help, fn] : commands)
        app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        error_record("usage", {e.what()});
        return bad_input;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    Handler handler = nullptr;
    for (const auto& [name, help, fn] : commands)
        if (name == command)
            handler = fn;

    Context ctx;
    try {
        ctx.cfg = config_path.empty() ? parse_config_text("") : parse_config(config_path);
    } catch (const ConfigError& e) {
        error_record("config", e.messages());
        return bad_input;
    }

    bool seed_generated = false;
    if (seed_flag)
        ctx.seed = *seed_flag;
    else if (ctx.cfg.seed)
        ctx.seed = *ctx.cfg.seed;
    else {
        std::random_device rd;
        ctx.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
        seed_generated = true;
        std::cout << "seed " << ctx.seed << " (generated)\n";
    }
    ctx.threads = threads_flag ? *threads_flag : std::max(1u, std::thread::hardware_concurrency());
    if (!out_flag.empty())
        ctx.out = out_flag;
    else if (const char* env = std::getenv("FRACSHOCK_OUT"); env && *env)
        ctx.out = env;
    else if (!ctx.cfg.directory.empty())
        ctx.out = ctx.cfg.directory;
    else
        ctx.out = "fracshock_out";

    std::string report_stem = "report_" + command;
    for (auto& ch : report_stem)
        if (ch == '-')
            ch = '_';

    try {
        fs::create_directories(ctx.out);
        json run{{"program", "fracshock"},
                 {"version", version},
                 {"command", command},
                 {"seed", ctx.seed},
                 {"seed_generated", seed_generated},
                 {"n_paths", ctx.cfg.paths},
                 {"config", ctx.cfg.echo()}};
        if (command != "selftest") {
            const Solver base(ctx.cfg.make_problem(), ctx.cfg.solver);
            run["resolved"] = {{"dt", base.dt()},
                               {"n_steps", base.n_steps()},
                               {"stability_bound", base.stability_bound()}};
        }
        write_text(ctx.out / "run.json", run.dump(2) + "\n");

        const Outcome o = handler(ctx);
        run["pass"] = o.pass;
        run["reports"] = json::array();
        if (ctx.cfg.write_json) {
            write_text(ctx.out / (report_stem + ".json"), o.report.dump(2) + "\n");
            run["reports"].push_back(report_stem + ".json");
        }
        if (ctx.cfg.write_csv && o.csv) {
            std::ostringstream os;
            o.csv(os);
            write_text(ctx.out / (report_stem + ".csv"), os.str());
            run["reports"].push_back(report_stem + ".csv");
        }
        write_text(ctx.out / "run.json", run.dump(2) + "\n");
        std::cout << command << ": " << (o.pass ? "PASS" : "FAIL") << " (" << (ctx.out / report_stem).string()
                  << ".*)\n";
        return o.pass ? ok : failed;
    } catch (const SolverError& e) {
        error_record("solver", {e.what()});
        return runtime_failure;
    } catch (const std::invalid_argument& e) {
        error_record("invalid_argument", {e.what()});
        return bad_input;
    } catch (const std::exception& e) {
        error_record("runtime", {e.what()});
        return runtime_failure;
    }
}
