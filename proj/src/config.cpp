#include "fracshock/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace fracshock {

// ---------------------------------------------------------------- profiles

Field ProfileSpec::sample(const Grid& grid) const
{
    const ProfileSpec p = *this;
    if (name == "bump")
        return grid.sample([&](double x) { return p.offset + p.amplitude * smooth_bump(x, p.center, p.width); });
    if (name == "gaussian")
        return grid.sample([&](double x) {
            const double s = (x - p.center) / p.width;
            return p.offset + p.amplitude * std::exp(-s * s);
        });
    if (name == "sine")
        return grid.sample([&](double x) { return p.offset + p.amplitude * std::sin(p.frequency * (x - p.center)); });
    if (name == "step")
        return grid.sample([&](double x) { return p.offset + (std::abs(x - p.center) < p.width ? p.amplitude : 0.0); });
    if (name == "tanh")
        return grid.sample([&](double x) { return p.offset + p.amplitude * std::tanh((x - p.center) / p.width); });
    if (name == "zero")
        return Field(grid.size(), 0.0);
    throw std::invalid_argument("unknown profile '" + name + "'");
}

// ---------------------------------------------------------------- value parsing

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<std::string> parse_value(const std::string& v, double& out)
{
    double d = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(d))
        return "expected a finite number, got '" + v + "'";
    out = d;
    return std::nullopt;
}

template <class U>
std::optional<std::string> parse_unsigned(const std::string& v, U& out)
{
    U n = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || ptr != v.data() + v.size())
        return "expected a nonnegative integer, got '" + v + "'";
    out = n;
    return std::nullopt;
}

std::optional<std::string> parse_value(const std::string& v, std::size_t& out) { return parse_unsigned(v, out); }

std::optional<std::string> parse_value(const std::string& v, bool& out)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        out = true;
    else if (v == "false" || v == "0" || v == "no" || v == "off")
        out = false;
    else
        return "expected a boolean, got '" + v + "'";
    return std::nullopt;
}

std::optional<std::string> parse_value(const std::string& v, std::string& out)
{
    out = v;
    return std::nullopt;
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

std::optional<std::string> parse_value(const std::string& v, std::vector<double>& out)
{
    std::vector<double> xs;
    for (const auto& item : split_list(v)) {
        double d = 0.0;
        if (auto err = parse_value(item, d))
            return "in list: " + *err;
        xs.push_back(d);
    }
    out = std::move(xs);
    return std::nullopt;
}

nlohmann::json to_value(double v) { return v; }
nlohmann::json to_value(std::size_t v) { return v; }
nlohmann::json to_value(bool v) { return v; }
nlohmann::json to_value(const std::string& v) { return v; }
nlohmann::json to_value(const std::vector<double>& v) { return v; }

struct Key {
    std::string name;
    std::function<std::optional<std::string>(RunConfig&, const std::string&)> set;
    std::function<nlohmann::json(const RunConfig&)> get;
};

template <class Access>
Key field(std::string name, Access access)
{
    return {std::move(name),
            [access](RunConfig& c, const std::string& v) { return parse_value(v, access(c)); },
            [access](const RunConfig& c) { return to_value(access(const_cast<RunConfig&>(c))); }};
}

#define FIELD(key, member) field(key, [](RunConfig& c) -> auto& { return c.member; })

void add_profile_keys(std::vector<Key>& keys, const std::string& prefix, ProfileSpec RunConfig::*which)
{
    auto acc = [which](auto member) {
        return [which, member](RunConfig& c) -> auto& { return (c.*which).*member; };
    };
    keys.push_back(field(prefix, acc(&ProfileSpec::name)));
    keys.push_back(field(prefix + "_center", acc(&ProfileSpec::center)));
    keys.push_back(field(prefix + "_width", acc(&ProfileSpec::width)));
    keys.push_back(field(prefix + "_amplitude", acc(&ProfileSpec::amplitude)));
    keys.push_back(field(prefix + "_offset", acc(&ProfileSpec::offset)));
    keys.push_back(field(prefix + "_frequency", acc(&ProfileSpec::frequency)));
}

const std::vector<Key>& key_table()
{
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        k.push_back(FIELD("grid.n_cells", n_cells));
        k.push_back(FIELD("grid.x_min", x_min));
        k.push_back(FIELD("grid.x_max", x_max));
        k.push_back({"grid.boundary",
                     [](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                         try {
                             c.boundary = boundary_from_string(v);
                         } catch (const std::exception& e) {
                             return std::string(e.what());
                         }
                         return std::nullopt;
                     },
                     [](const RunConfig& c) -> nlohmann::json { return std::string(to_string(c.boundary)); }});

        k.push_back(FIELD("problem.flux", flux));
        k.push_back(FIELD("problem.flux_clip", flux_clip));
        k.push_back(FIELD("problem.flux_speed", flux_speed));
        k.push_back(FIELD("problem.diffusion", diffusion));
        k.push_back(FIELD("problem.diffusion_threshold", diffusion_threshold));
        k.push_back(FIELD("problem.diffusion_slope", diffusion_slope));
        k.push_back(FIELD("problem.diffusion_scale", diffusion_scale));
        k.push_back(FIELD("problem.diffusion_level", diffusion_level));
        k.push_back(FIELD("problem.noise", noise));
        k.push_back(FIELD("problem.noise_K", noise_K));
        k.push_back(FIELD("problem.noise_sigma", noise_sigma));
        k.push_back(FIELD("problem.noise_modes", noise_modes));
        k.push_back(FIELD("problem.space_dependent", space_dependent));
        k.push_back(FIELD("problem.noise_center", noise_center));
        k.push_back(FIELD("problem.noise_width", noise_width));
        k.push_back(FIELD("problem.noise_working_range", noise_working_range));
        add_profile_keys(k, "problem.u0", &RunConfig::u0);
        add_profile_keys(k, "problem.v0", &RunConfig::v0);

        k.push_back(FIELD("solver.epsilon", solver.epsilon));
        k.push_back({"solver.dt",
                     [](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                         if (v == "auto") {
                             c.dt_auto = true;
                             c.solver.dt = 0.0;
                             return std::nullopt;
                         }
                         double d = 0.0;
                         if (auto err = parse_value(v, d))
                             return "expected 'auto' or a number, got '" + v + "'";
                         c.dt_auto = false;
                         c.solver.dt = d;
                         return std::nullopt;
                     },
                     [](const RunConfig& c) -> nlohmann::json {
                         if (c.dt_auto)
                             return "auto";
                         return c.solver.dt;
                     }});
        k.push_back(FIELD("solver.t_end", solver.t_end));
        k.push_back(FIELD("solver.cfl_safety", solver.cfl_safety));
        k.push_back({"solver.scheme",
                     [](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                         try {
                             c.solver.scheme = scheme_from_string(v);
                         } catch (const std::exception& e) {
                             return std::string(e.what());
                         }
                         return std::nullopt;
                     },
                     [](const RunConfig& c) -> nlohmann::json { return std::string(to_string(c.solver.scheme)); }});
        k.push_back(FIELD("solver.r_split", solver.r_split));
        k.push_back(FIELD("solver.mollify_initial", solver.mollify_initial));
        k.push_back(FIELD("solver.lambda", lambda));
        k.push_back(FIELD("solver.c_lambda", c_lambda));

        k.push_back(FIELD("experiment.name", name));
        k.push_back({"experiment.seed",
                     [](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                         std::uint64_t s = 0;
                         if (auto err = parse_unsigned(v, s))
                             return err;
                         c.seed = s;
                         return std::nullopt;
                     },
                     [](const RunConfig& c) -> nlohmann::json {
                         if (c.seed)
                             return *c.seed;
                         return nullptr;
                     }});
        k.push_back(FIELD("experiment.paths", paths));
        k.push_back(FIELD("experiment.snapshots", snapshots));
        k.push_back(FIELD("experiment.eps_list", eps_list));
        k.push_back(FIELD("experiment.cd_deltas", cd_deltas));
        k.push_back(FIELD("experiment.entropy_deltas", entropy_deltas));
        k.push_back(FIELD("experiment.k_count", k_count));
        k.push_back(FIELD("experiment.k_pad", k_pad));
        k.push_back(FIELD("experiment.quadrature_dt", quadrature_dt));
        k.push_back(FIELD("experiment.entropy_r", entropy_r));
        k.push_back(FIELD("experiment.entropy_tol_constant", entropy_tol_constant));
        k.push_back(FIELD("experiment.path_quantile", path_quantile));
        k.push_back(FIELD("experiment.contraction_tol", contraction_tol));
        k.push_back(FIELD("experiment.slope_tol", slope_tol));
        k.push_back(FIELD("experiment.ci_floor", ci_floor));
        k.push_back(FIELD("experiment.ref_fraction", ref_fraction));
        k.push_back(FIELD("experiment.bootstrap_replicates", bootstrap_replicates));
        k.push_back({"experiment.bootstrap_seed",
                     [](RunConfig& c, const std::string& v) { return parse_unsigned(v, c.bootstrap_seed); },
                     [](const RunConfig& c) -> nlohmann::json { return c.bootstrap_seed; }});
        k.push_back(FIELD("experiment.tv_tol", tv_tol));
        k.push_back(FIELD("experiment.l1_ratio_limit", l1_ratio_limit));
        k.push_back(FIELD("experiment.energy_ratio_limit", energy_ratio_limit));

        k.push_back(FIELD("output.directory", directory));
        k.push_back({"output.formats",
                     [](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                         bool json = false, csv = false;
                         for (const auto& f : split_list(v)) {
                             if (f == "json")
                                 json = true;
                             else if (f == "csv")
                                 csv = true;
                             else
                                 return "unknown output format '" + f + "' (expected json, csv)";
                         }
                         c.write_json = json;
                         c.write_csv = csv;
                         return std::nullopt;
                     },
                     [](const RunConfig& c) -> nlohmann::json {
                         std::vector<std::string> f;
                         if (c.write_json)
                             f.push_back("json");
                         if (c.write_csv)
                             f.push_back("csv");
                         return f;
                     }});
        k.push_back(FIELD("output.field_paths", field_paths));
        return k;
    }();
    return table;
}

#undef FIELD

std::string num(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void require(std::vector<std::string>& errs, bool ok, const std::string& msg)
{
    if (!ok)
        errs.push_back(msg);
}

} // namespace

// ---------------------------------------------------------------- RunConfig

Problem RunConfig::make_problem() const { return make_problem(u0); }

Problem RunConfig::make_problem(const ProfileSpec& initial) const
{
    const Grid grid(n_cells, x_min, x_max, boundary);
    FluxSpec f;
    if (flux == "burgers")
        f = burgers_flux(flux_clip);
    else if (flux == "linear")
        f = linear_flux(flux_speed);
    else if (flux == "zero")
        f = zero_flux();
    else
        throw std::invalid_argument("unknown flux '" + flux + "'");
    DiffusionSpec a;
    if (diffusion == "ramp")
        a = ramp_diffusion(diffusion_threshold, diffusion_slope);
    else if (diffusion == "identity")
        a = identity_diffusion(diffusion_scale);
    else if (diffusion == "saturating")
        a = saturating_diffusion(diffusion_level);
    else if (diffusion == "zero")
        a = zero_diffusion();
    else
        throw std::invalid_argument("unknown diffusion '" + diffusion + "'");
    NoiseSpec g;
    if (space_dependent || noise == "space_dependent")
        g = space_dependent_noise(noise_K, noise_modes, noise_center, noise_width, noise_working_range);
    else if (noise == "geometric")
        g = geometric_noise(noise_K, noise_modes);
    else if (noise == "single_mode")
        g = single_mode_noise(noise_sigma);
    else if (noise == "none")
        g = no_noise();
    else
        throw std::invalid_argument("unknown noise family '" + noise + "'");
    return Problem{grid, std::move(f), std::move(a), std::move(g), initial.sample(grid), lambda, c_lambda};
}

EntropyCheckSpec RunConfig::entropy_spec(const Solver& solver) const
{
    EntropyCheckSpec s;
    s.phis = test_function_library(solver.problem().grid, solver.config().t_end);
    s.ks = k_lattice(solver.initial_state(), k_count, k_pad);
    s.deltas = entropy_deltas;
    s.r = entropy_r;
    s.quadrature_dt = quadrature_dt;
    s.tol_constant = entropy_tol_constant;
    s.path_quantile = path_quantile;
    return s;
}

RateOptions RunConfig::rate_options() const
{
    RateOptions r;
    r.slope_tol = slope_tol;
    r.ci_floor = ci_floor;
    r.ref_fraction = ref_fraction;
    r.bootstrap_replicates = bootstrap_replicates;
    r.bootstrap_seed = bootstrap_seed;
    return r;
}

ViscousLimits RunConfig::viscous_limits() const { return {tv_tol, l1_ratio_limit, energy_ratio_limit}; }

std::vector<std::uint64_t> RunConfig::seeds(std::uint64_t base) const
{
    std::vector<std::uint64_t> s(paths);
    for (std::size_t i = 0; i < paths; ++i)
        s[i] = base + i;
    return s;
}

nlohmann::json RunConfig::echo() const
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& k : key_table())
        j[k.name] = k.get(*this);
    return j;
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> out;
    for (const auto& k : key_table())
        out.push_back(k.name);
    return out;
}

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::invalid_argument([&] {
        std::string s = "invalid configuration:";
        for (const auto& m : messages)
            s += "\n  " + m;
        return s;
    }())
    , messages_(std::move(messages))
{
}

// ---------------------------------------------------------------- validation

std::vector<std::string> validate_config(const RunConfig& c)
{
    std::vector<std::string> e;
    require(e, c.n_cells >= 8, "grid.n_cells must be at least 8");
    require(e, c.x_max > c.x_min, "grid.x_max must exceed grid.x_min");
    static const std::set<std::string> fluxes{"burgers", "linear", "zero"};
    static const std::set<std::string> diffs{"ramp", "identity", "saturating", "zero"};
    static const std::set<std::string> noises{"geometric", "single_mode", "space_dependent", "none"};
    static const std::set<std::string> profiles{"bump", "gaussian", "sine", "step", "tanh", "zero"};
    require(e, fluxes.count(c.flux) > 0, "problem.flux must be one of burgers, linear, zero");
    require(e, diffs.count(c.diffusion) > 0, "problem.diffusion must be one of ramp, identity, saturating, zero");
    require(e, noises.count(c.noise) > 0, "problem.noise must be one of geometric, single_mode, space_dependent, none");
    require(e, profiles.count(c.u0.name) > 0, "problem.u0 must be one of bump, gaussian, sine, step, tanh, zero");
    require(e, profiles.count(c.v0.name) > 0, "problem.v0 must be one of bump, gaussian, sine, step, tanh, zero");
    require(e, c.u0.width > 0.0 && c.v0.width > 0.0, "profile widths must be positive");
    require(e, c.flux_clip > 0.0, "problem.flux_clip must be positive");
    require(e, c.diffusion_slope >= 0.0 && c.diffusion_scale >= 0.0 && c.diffusion_level > 0.0,
            "diffusion parameters must keep A nondecreasing (slope, scale >= 0, level > 0)");
    require(e, c.noise_K >= 0.0, "problem.noise_K must be nonnegative");
    require(e, c.noise_modes >= 1, "problem.noise_modes must be at least 1");
    require(e, !(c.space_dependent && (c.noise == "single_mode" || c.noise == "none")),
            "problem.space_dependent = true requires the geometric or space_dependent noise family");

    const bool space_dep = c.space_dependent || c.noise == "space_dependent";
    require(e, c.lambda > 0.0 && c.lambda < 1.0, "solver.lambda = " + num(c.lambda)
                                                      + " violates the constraint lambda in (0, 1)");
    if (space_dep && c.lambda >= 0.5)
        e.push_back("solver.lambda = " + num(c.lambda)
                    + ": space-dependent noise is only admissible for lambda in (0, 1/2), i.e. lambda < 1/2");
    require(e, c.c_lambda > 0.0, "solver.c_lambda must be positive");
    require(e, c.solver.epsilon >= 0.0, "solver.epsilon must be nonnegative");
    require(e, c.solver.t_end > 0.0, "solver.t_end must be positive");
    require(e, c.solver.cfl_safety > 0.0 && c.solver.cfl_safety <= 1.0, "solver.cfl_safety must lie in (0, 1]");
    require(e, c.solver.r_split > 0.0, "solver.r_split must be positive");
    require(e, c.dt_auto || c.solver.dt > 0.0, "solver.dt must be positive or 'auto'");
    require(e, c.paths >= 1, "experiment.paths must be at least 1");
    require(e, c.snapshots >= 1, "experiment.snapshots must be at least 1");
    require(e, c.k_count >= 2, "experiment.k_count must be at least 2");
    require(e, c.quadrature_dt > 0.0, "experiment.quadrature_dt must be positive");
    require(e, c.entropy_r > 0.0, "experiment.entropy_r must be positive");
    require(e, c.path_quantile > 0.0 && c.path_quantile <= 1.0, "experiment.path_quantile must lie in (0, 1]");
    require(e, c.ref_fraction > 0.0 && c.ref_fraction <= 0.125, "experiment.ref_fraction must lie in (0, 1/8]");
    require(e, std::all_of(c.entropy_deltas.begin(), c.entropy_deltas.end(), [](double d) { return d > 0.0; })
                   && !c.entropy_deltas.empty(),
            "experiment.entropy_deltas must be a nonempty list of positive values");
    require(e, std::all_of(c.eps_list.begin(), c.eps_list.end(), [](double d) { return d > 0.0; }),
            "experiment.eps_list values must be positive");
    require(e, c.write_json || c.write_csv, "output.formats must name at least one format");
    if (!e.empty())
        return e;

    // semantic checks on the assembled problem
    try {
        const Problem p = c.make_problem();
        validate_problem(p);
        if (!c.dt_auto) {
            const FractionalKernel k = build_kernel(p.grid, c.lambda, c.c_lambda, c.solver.r_split);
            double eps_max = c.solver.epsilon;
            for (double v : c.eps_list)
                eps_max = std::max(eps_max, v);
            SolverConfig sc = c.solver;
            sc.epsilon = eps_max;
            const double bound = stable_dt(sc, p.flux, p.diffusion, k, p.grid);
            if (c.solver.dt > bound)
                e.push_back("solver.dt = " + num(c.solver.dt) + " exceeds the stability bound "
                            + num(bound) + " (largest epsilon " + num(eps_max) + ")");
        }
    } catch (const std::exception& ex) {
        e.push_back(ex.what());
    }
    return e;
}

// ---------------------------------------------------------------- parsing

RunConfig parse_config_text(const std::string& text)
{
    std::map<std::string, const Key*> index;
    for (const auto& k : key_table())
        index[k.name] = &k;
    RunConfig c;
    std::vector<std::string> errs;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) {
            errs.push_back(where + "expected 'section.key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = index.find(key);
        if (it == index.end()) {
            errs.push_back(where + "unknown key '" + key + "'");
            continue;
        }
        if (!seen.insert(key).second) {
            errs.push_back(where + "duplicate key '" + key + "'");
            continue;
        }
        if (auto err = it->second->set(c, value))
            errs.push_back(where + key + ": " + *err);
    }
    for (auto& v : validate_config(c))
        errs.push_back(std::move(v));
    if (!errs.empty())
        throw ConfigError(std::move(errs));
    return c;
}

RunConfig parse_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError({"cannot read config file '" + path + "'"});
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace fracshock
