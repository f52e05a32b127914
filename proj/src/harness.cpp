#include "fiegarch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "fiegarch/errors.hpp"
#include "fiegarch/io.hpp"
#include "fiegarch/random.hpp"

namespace fiegarch {

using json = nlohmann::ordered_json;

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::Simulate: return "simulate";
        case Mode::Estimate: return "estimate";
        case Mode::Study: return "study";
        case Mode::Example: return "example";
    }
    return "?";
}

Mode parse_mode(std::string_view text) {
    for (Mode m : {Mode::Simulate, Mode::Estimate, Mode::Study, Mode::Example}) {
        if (to_string(m) == text) return m;
    }
    throw ConfigError("unknown mode '" + std::string(text) + "'");
}

RunConfig default_config(Mode mode) {
    RunConfig cfg;
    cfg.mode = mode;
    if (mode == Mode::Estimate) {
        cfg.d0_grid.clear();
        cfg.nu0_grid.clear();
    }
    if (mode == Mode::Example) {
        cfg.d0_grid = {0.25};
        cfg.nu0_grid = {1.9};
        cfg.n_iter = 20801;
        cfg.thinning = 20;
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Key/value configuration

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    throw ConfigError("bad value for " + key + ": '" + value + "' (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& value) {
    std::string_view s = trim(value);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        bad_value(key, value, "a finite number");
    }
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    const std::string_view s = trim(value);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        bad_value(key, value, "a non-negative integer");
    }
    return v;
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string_view rest = trim(value);
    if (rest.empty()) return out;
    for (;;) {
        const auto comma = rest.find(',');
        out.push_back(to_double(key, std::string(rest.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

std::string from_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

bool to_bool(const std::string& key, const std::string& value) {
    const auto s = trim(value);
    if (s == "true" || s == "on" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "off" || s == "0" || s == "no") return false;
    bad_value(key, value, "true or false");
}

struct KeyHandler {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::optional<std::string>(const RunConfig&)> get;
};

KeyHandler real(std::string key, double RunConfig::*field) {
    return {key, [key, field](RunConfig& c, const std::string& v) { c.*field = to_double(key, v); },
            [field](const RunConfig& c) { return std::optional<std::string>(format_double(c.*field)); }};
}

KeyHandler optional_real(std::string key, std::optional<double> RunConfig::*field) {
    return {key,
            [key, field](RunConfig& c, const std::string& v) {
                if (trim(v).empty()) c.*field = std::nullopt;
                else c.*field = to_double(key, v);
            },
            [field](const RunConfig& c) {
                return (c.*field) ? std::optional<std::string>(format_double(*(c.*field))) : std::nullopt;
            }};
}

KeyHandler count(std::string key, std::size_t RunConfig::*field) {
    return {key,
            [key, field](RunConfig& c, const std::string& v) { c.*field = static_cast<std::size_t>(to_u64(key, v)); },
            [field](const RunConfig& c) { return std::optional<std::string>(std::to_string(c.*field)); }};
}

KeyHandler list(std::string key, std::vector<double> RunConfig::*field) {
    return {key, [key, field](RunConfig& c, const std::string& v) { c.*field = to_list(key, v); },
            [field](const RunConfig& c) { return std::optional<std::string>(from_list(c.*field)); }};
}

KeyHandler path_key(std::string key, std::filesystem::path RunConfig::*field) {
    return {key, [field](RunConfig& c, const std::string& v) { c.*field = std::string(trim(v)); },
            [field](const RunConfig& c) { return std::optional<std::string>((c.*field).string()); }};
}

const std::vector<KeyHandler>& handlers() {
    static const std::vector<KeyHandler> table = [] {
        std::vector<KeyHandler> h;
        h.push_back(real("a1", &RunConfig::a1));
        h.push_back(real("a2", &RunConfig::a2));
        h.push_back(real("a3", &RunConfig::a3));
        h.push_back(list("alpha0", &RunConfig::alpha0));
        h.push_back(list("beta0", &RunConfig::beta0));
        h.push_back(count("burn_in", &RunConfig::burn_in));
        h.push_back(real("c32_a1", &RunConfig::c32_a1));
        h.push_back(real("c32_b1", &RunConfig::c32_b1));
        h.push_back(real("c42_a2", &RunConfig::c42_a2));
        h.push_back(real("c42_b2", &RunConfig::c42_b2));
        h.push_back({"case", [](RunConfig& c, const std::string& v) { c.prior_case = parse_case(trim(v)); },
                     [](const RunConfig& c) { return std::optional<std::string>(std::string(to_string(c.prior_case))); }});
        h.push_back(list("d0", &RunConfig::d0_grid));
        h.push_back(optional_real("d_bar", &RunConfig::d_bar));
        h.push_back(count("example_draws", &RunConfig::example_draws));
        h.push_back(real("gamma0", &RunConfig::gamma0));
        h.push_back({"hastings",
                     [](RunConfig& c, const std::string& v) {
                         c.hastings = to_bool("hastings", v) ? HastingsCorrection::On : HastingsCorrection::Off;
                     },
                     [](const RunConfig& c) {
                         return std::optional<std::string>(c.hastings == HastingsCorrection::On ? "on" : "off");
                     }});
        h.push_back(count("hist_bins", &RunConfig::hist_bins));
        h.push_back(path_key("input", &RunConfig::input));
        h.push_back(count("kde_points", &RunConfig::kde_points));
        h.push_back(count("m_star", &RunConfig::m_star));
        h.push_back(optional_real("mu_phi", &RunConfig::mu_phi));
        h.push_back(count("n", &RunConfig::n));
        h.push_back(count("n_iter", &RunConfig::n_iter));
        h.push_back(list("nu0", &RunConfig::nu0_grid));
        h.push_back(real("omega0", &RunConfig::omega0));
        h.push_back(path_key("output_dir", &RunConfig::output_dir));
        h.push_back({"presample",
                     [](RunConfig& c, const std::string& v) {
                         const auto s = trim(v);
                         if (s == "conditional") c.convention = PresampleConvention::Conditional;
                         else if (s == "paper-literal") c.convention = PresampleConvention::PaperLiteral;
                         else bad_value("presample", v, "conditional or paper-literal");
                     },
                     [](const RunConfig& c) {
                         return std::optional<std::string>(
                             c.convention == PresampleConvention::Conditional ? "conditional" : "paper-literal");
                     }});
        h.push_back(count("replicates", &RunConfig::replicates));
        h.push_back({"seed", [](RunConfig& c, const std::string& v) {
                         if (trim(v).empty()) c.seed = std::nullopt;
                         else c.seed = to_u64("seed", v);
                     },
                     [](const RunConfig& c) {
                         return c.seed ? std::optional<std::string>(std::to_string(*c.seed)) : std::nullopt;
                     }});
        h.push_back(real("sigma_phi", &RunConfig::sigma_phi));
        h.push_back({"sim_presample",
                     [](RunConfig& c, const std::string& v) {
                         const auto s = trim(v);
                         if (s == "innovations") c.sim_presample = SimulationPresample::Innovations;
                         else if (s == "zero") c.sim_presample = SimulationPresample::Zero;
                         else bad_value("sim_presample", v, "innovations or zero");
                     },
                     [](const RunConfig& c) {
                         return std::optional<std::string>(
                             c.sim_presample == SimulationPresample::Innovations ? "innovations" : "zero");
                     }});
        h.push_back(real("theta0", &RunConfig::theta0));
        h.push_back(optional_real("theta_bar", &RunConfig::theta_bar));
        h.push_back(count("thinning", &RunConfig::thinning));
        h.push_back(count("workers", &RunConfig::workers));
        h.push_back({"write_chains",
                     [](RunConfig& c, const std::string& v) { c.write_chains = to_bool("write_chains", v); },
                     [](const RunConfig& c) { return std::optional<std::string>(c.write_chains ? "true" : "false"); }});
        return h;
    }();
    return table;
}

// kernel_<name>_<field>; the name may itself contain underscores.
bool apply_kernel_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    constexpr std::string_view prefix = "kernel_";
    if (key.rfind(prefix, 0) != 0) return false;
    const auto last = key.rfind('_');
    if (last == std::string::npos || last <= prefix.size()) return false;
    const std::string name = key.substr(prefix.size(), last - prefix.size());
    const std::string field = key.substr(last + 1);
    auto& ov = cfg.kernel[name];
    const double v = to_double(key, value);
    if (field == "sd") ov.sd = v;
    else if (field == "lower") ov.lower = v;
    else if (field == "upper") ov.upper = v;
    else return false;
    return true;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& h : handlers()) k.push_back(h.key);
        return k;
    }();
    return keys;
}

KeyValues parse_key_values(const std::string& text, const std::string& origin) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s(line);
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key(trim(s.substr(0, eq)));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (kv.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
        kv[key] = std::string(trim(s.substr(eq + 1)));
    }
    return kv;
}

KeyValues read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str(), path.string());
}

RunConfig parse_config(Mode mode, const KeyValues& kv) {
    RunConfig cfg = default_config(mode);
    for (const auto& [key, value] : kv) {
        const auto& hs = handlers();
        const auto it = std::find_if(hs.begin(), hs.end(), [&](const KeyHandler& h) { return h.key == key; });
        if (it != hs.end()) {
            it->set(cfg, value);
        } else if (!apply_kernel_key(cfg, key, value)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (cfg.thinning == 0) throw ConfigError("thinning must be at least 1");
    if (cfg.n == 0) throw ConfigError("n must be positive");
    if (cfg.workers == 0) throw ConfigError("workers must be at least 1");
    return cfg;
}

std::string config_echo(const RunConfig& cfg) {
    std::map<std::string, std::string> lines;
    for (const auto& h : handlers()) {
        if (auto v = h.get(cfg)) lines[h.key] = *v;
    }
    for (const auto& [name, ov] : cfg.kernel) {
        if (ov.sd) lines["kernel_" + name + "_sd"] = format_double(*ov.sd);
        if (ov.lower) lines["kernel_" + name + "_lower"] = format_double(*ov.lower);
        if (ov.upper) lines["kernel_" + name + "_upper"] = format_double(*ov.upper);
    }
    std::string out = "# mode=" + std::string(to_string(cfg.mode)) + "\n";
    for (const auto& [k, v] : lines) out += k + " = " + v + "\n";
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    RunConfig c = cfg;
    c.output_dir = ".";
    c.workers = 1;
    const std::string text = config_echo(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Cells, catalogs, kernels

CellSeeds cell_seeds(std::uint64_t base, std::size_t cell_index) {
    return {derive_seed(base, 2 * static_cast<std::uint64_t>(cell_index)),
            derive_seed(base, 2 * static_cast<std::uint64_t>(cell_index) + 1)};
}

std::vector<Cell> enumerate_cells(const RunConfig& cfg, std::uint64_t base_seed) {
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < cfg.d0_grid.size(); ++i) {
        for (std::size_t j = 0; j < cfg.nu0_grid.size(); ++j) {
            for (std::size_t r = 0; r < cfg.replicates; ++r) {
                Cell c;
                c.d_index = i;
                c.nu_index = j;
                c.replicate = r;
                c.index = (i * cfg.nu0_grid.size() + j) * cfg.replicates + r;
                c.d0 = cfg.d0_grid[i];
                c.nu0 = cfg.nu0_grid[j];
                c.seeds = cell_seeds(base_seed, c.index);
                cells.push_back(c);
            }
        }
    }
    return cells;
}

ModelSpec truth_for(const RunConfig& cfg, double d0, double nu0) {
    ModelSpec s;
    s.nu = nu0;
    s.d = d0;
    s.theta = cfg.theta0;
    s.gamma = cfg.gamma0;
    s.omega = cfg.omega0;
    s.alpha = cfg.alpha0;
    s.beta = cfg.beta0;
    return s;
}

PriorCatalog catalog_for(const RunConfig& cfg, CaseLabel label, const std::optional<ModelSpec>& truth,
                         std::optional<double> d_bar, std::optional<double> theta_bar) {
    HyperParameters hp;
    hp.sigma_phi = cfg.sigma_phi;
    hp.mu_phi = cfg.mu_phi;
    hp.a1 = cfg.a1;
    hp.a2 = cfg.a2;
    hp.a3 = cfg.a3;
    hp.theta0 = cfg.theta0;
    hp.gamma0 = cfg.gamma0;
    if (truth) {
        hp.d0 = truth->d;
        hp.theta0 = truth->theta;
        hp.gamma0 = truth->gamma;
    }
    if (label == CaseLabel::C3_2) {
        hp.a1 = cfg.c32_a1;
        hp.b1 = cfg.c32_b1;
    }
    if (label == CaseLabel::C4_2) {
        hp.a2 = cfg.c42_a2;
        hp.b2 = cfg.c42_b2;
    }
    hp.d_bar = d_bar;
    hp.theta_bar = theta_bar;
    return hyperparameters_from_truth(label, hp, cfg.alpha0.size(), cfg.beta0.size());
}

KernelSpec kernel_for(const RunConfig& cfg, CaseLabel label, std::size_t p, std::size_t q) {
    KernelSpec k = KernelSpec::defaults(label, p, q);
    const auto names = ModelSpec::parameter_names(p, q);
    for (const auto& [name, ov] : cfg.kernel) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw ConfigError("kernel override for unknown parameter '" + name + "'");
        auto& slot = k.slots[static_cast<std::size_t>(it - names.begin())];
        if (ov.sd) slot.sd = *ov.sd;
        if (ov.lower) slot.lower = *ov.lower;
        if (ov.upper) slot.upper = *ov.upper;
    }
    try {
        k.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("kernel override: ") + e.what());
    }
    return k;
}

std::optional<CaseLabel> first_stage_of(CaseLabel label) {
    switch (label) {
        case CaseLabel::C2_3: return CaseLabel::C2_2;
        case CaseLabel::C3_3: return CaseLabel::C3_2;
        case CaseLabel::C5_2: return CaseLabel::C1;
        default: return std::nullopt;
    }
}

PriorCatalog example_catalog() {
    PriorCatalog cat = table2_catalog();
    cat.priors[kTheta] = PriorSpec::uniform(-0.5, 0.0);
    cat.priors[kGamma] = PriorSpec::uniform(0.0, 0.5);
    return cat;
}

// ---------------------------------------------------------------------------
// Estimation

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ChainSettings settings_of(const RunConfig& cfg) {
    ChainSettings s;
    s.n_iter = cfg.n_iter;
    s.burn_in = cfg.burn_in;
    s.thinning = cfg.thinning;
    s.hastings = cfg.hastings;
    return s;
}

Estimation estimate_with(const RunConfig& cfg, std::span<const double> x, const std::optional<ModelSpec>& truth,
                         std::uint64_t chain_seed, std::size_t init_workers,
                         const std::optional<PriorCatalog>& catalog_override) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t p = cfg.alpha0.size();
    const std::size_t q = cfg.beta0.size();
    const CaseLabel label = cfg.prior_case;

    Estimation est;
    est.label = label;
    ParameterGrid grid = ParameterGrid::defaults(x);
    grid.alpha.assign(p, 0.0);
    grid.beta.assign(q, 0.0);
    est.init = grid_initialize(x, grid, cfg.convention, init_workers);
    const ChainSettings settings = settings_of(cfg);

    std::optional<double> d_bar = cfg.d_bar;
    std::optional<double> theta_bar = cfg.theta_bar;
    if (const auto first = first_stage_of(label); first && !catalog_override) {
        const bool wants_theta = label == CaseLabel::C3_3;
        if (wants_theta ? !theta_bar : !d_bar) {
            const Chain stage = gibbs_run(x, catalog_for(cfg, *first, truth), kernel_for(cfg, *first, p, q),
                                          est.init, settings, derive_seed(chain_seed, 0), cfg.convention);
            const auto col = stage.column(wants_theta ? kTheta : kD);
            const double m = mean_sd(col).first;
            (wants_theta ? theta_bar : d_bar) = m;
            est.first_stage = *first;
            est.first_stage_estimate = m;
        }
    }

    const PriorCatalog catalog = catalog_override ? *catalog_override : catalog_for(cfg, label, truth, d_bar, theta_bar);
    est.chain = gibbs_run(x, catalog, kernel_for(cfg, label, p, q), est.init, settings, chain_seed, cfg.convention);
    if (truth) {
        const auto tv = truth->to_vector();
        est.summaries = summarize(est.chain, std::span<const double>(tv));
    } else {
        est.summaries = summarize(est.chain);
    }
    est.seconds = seconds_since(t0);
    return est;
}

std::uint64_t resolve_seed(const RunConfig& cfg) {
    if (cfg.seed) return *cfg.seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Echo stored with the outputs; it names no output location so a rerun can
// write anywhere and still reproduce every file.
std::string stored_echo(const RunConfig& cfg) {
    RunConfig c = cfg;
    c.output_dir = ".";
    return config_echo(c);
}

std::string cell_tag(const Cell& c) {
    return "d0-" + format_double(c.d0) + "_nu0-" + format_double(c.nu0) + "_rep-" + std::to_string(c.replicate);
}

void check_grid(const RunConfig& cfg) {
    if (cfg.d0_grid.empty() || cfg.nu0_grid.empty() || cfg.replicates == 0) {
        throw ConfigError("empty grid: d0, nu0 and replicates must each be non-empty");
    }
    for (double d : cfg.d0_grid) {
        if (!(d > -0.5 && d < 0.5)) throw ConfigError("d0 values must lie in (-0.5, 0.5)");
    }
    for (double nu : cfg.nu0_grid) {
        if (!(nu > 0.0)) throw ConfigError("nu0 values must be positive");
    }
}

json summary_json(const PosteriorSummary& s) {
    json j;
    j["parameter"] = s.name;
    j["mean"] = s.mean;
    j["sd"] = s.sd;
    j["ci_lower"] = s.ci_lower;
    j["ci_upper"] = s.ci_upper;
    if (s.truth) {
        j["truth"] = *s.truth;
        j["bias"] = *s.bias;
        j["ape"] = *s.ape;
        j["ape_gt_10pct"] = s.ape_gt_10pct();
        j["truth_in_ci"] = s.truth_in_ci();
    }
    return j;
}

json spec_json(const ModelSpec& s) {
    json j;
    const auto names = ModelSpec::parameter_names(s.p(), s.q());
    const auto v = s.to_vector();
    for (std::size_t i = 0; i < v.size(); ++i) j[names[i]] = v[i];
    return j;
}

json acceptance_json(const Chain& c) {
    json j;
    for (std::size_t i = 0; i < c.dimension(); ++i) j[c.names[i]] = c.acceptance_rate(i);
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& body) {
    const std::size_t n = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (n == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

Estimation estimate_series(const RunConfig& cfg, std::span<const double> x, const std::optional<ModelSpec>& truth,
                           std::uint64_t chain_seed, std::size_t init_workers) {
    return estimate_with(cfg, x, truth, chain_seed, init_workers, std::nullopt);
}

CellResult run_cell(const RunConfig& cfg, const Cell& cell) {
    CellResult res;
    res.cell = cell;
    try {
        const ModelSpec truth = truth_for(cfg, cell.d0, cell.nu0);
        const SimulatedSeries series = simulate(truth, cfg.n, cfg.m_star, cell.seeds.series, cfg.sim_presample);
        res.estimation = estimate_series(cfg, series.x, truth, cell.seeds.chain);
        res.ok = true;
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
        res.estimation.reset();
    }
    return res;
}

// ---------------------------------------------------------------------------
// Modes

SimulateOutput run_simulate(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    check_grid(cfg);
    cfg.seed = resolve_seed(cfg);
    const auto cells = enumerate_cells(cfg, *cfg.seed);
    const std::string hash = config_hash(cfg);

    SimulateOutput out;
    out.files.resize(cells.size());
    std::vector<std::string> errors(cells.size());
    parallel_for(cells.size(), cfg.workers, [&](std::size_t i) {
        const Cell& c = cells[i];
        const auto path = cfg.output_dir / ("series_" + cell_tag(c) + ".csv");
        const SimulatedSeries s = simulate(truth_for(cfg, c.d0, c.nu0), cfg.n, cfg.m_star, c.seeds.series,
                                           cfg.sim_presample);
        write_series_csv(path, s);
        out.files[i] = path;
    });

    json manifest;
    manifest["mode"] = "simulate";
    manifest["seed"] = *cfg.seed;
    manifest["config_hash"] = hash;
    manifest["seed_rule"] = "series seed of cell k = derive_seed(seed, 2k)";
    json files = json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        json f;
        f["path"] = out.files[i].filename().string();
        f["d0"] = cells[i].d0;
        f["nu0"] = cells[i].nu0;
        f["replicate"] = cells[i].replicate;
        f["cell"] = cells[i].index;
        f["seed"] = cells[i].seeds.series;
        f["config_hash"] = hash;
        files.push_back(f);
    }
    manifest["files"] = files;
    manifest["config"] = stored_echo(cfg);
    write_text(cfg.output_dir / "config.cfg", stored_echo(cfg));
    out.manifest = cfg.output_dir / "manifest.json";
    write_text(out.manifest, manifest.dump(2) + "\n");
    return out;
}

EstimateOutput run_estimate(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    if (cfg.input.empty()) throw ConfigError("estimate needs --input");
    if (cfg.d0_grid.size() > 1 || cfg.nu0_grid.size() > 1) {
        throw ConfigError("estimate takes at most one d0 and one nu0 value");
    }
    cfg.seed = resolve_seed(cfg);
    const auto x = read_series_csv(cfg.input);
    std::optional<ModelSpec> truth;
    if (cfg.d0_grid.size() == 1 && cfg.nu0_grid.size() == 1) truth = truth_for(cfg, cfg.d0_grid[0], cfg.nu0_grid[0]);
    const std::uint64_t chain_seed = cell_seeds(*cfg.seed, 0).chain;

    EstimateOutput out;
    out.estimation = estimate_series(cfg, x, truth, chain_seed, cfg.workers);
    const auto& est = out.estimation;

    out.chain_csv = cfg.output_dir / "chain.csv";
    write_chain_csv(out.chain_csv, est.chain);

    json summary;
    summary["case"] = std::string(to_string(est.label));
    summary["draws"] = est.chain.size();
    json params = json::array();
    for (const auto& s : est.summaries) params.push_back(summary_json(s));
    summary["parameters"] = params;
    out.summary_json = cfg.output_dir / "summary.json";
    write_text(out.summary_json, summary.dump(2) + "\n");

    json report;
    report["mode"] = "estimate";
    report["input"] = cfg.input.string();
    report["observations"] = x.size();
    report["seed"] = *cfg.seed;
    report["chain_seed"] = chain_seed;
    report["config_hash"] = config_hash(cfg);
    report["case"] = std::string(to_string(est.label));
    report["n_iter"] = est.chain.n_iter;
    report["burn_in"] = est.chain.burn_in;
    report["thinning"] = est.chain.thinning;
    report["draws"] = est.chain.size();
    report["initial"] = spec_json(est.init);
    report["acceptance_rates"] = acceptance_json(est.chain);
    if (est.first_stage) {
        report["first_stage"] = std::string(to_string(*est.first_stage));
        report["first_stage_estimate"] = *est.first_stage_estimate;
    }
    report["seconds"] = est.seconds;
    report["config"] = stored_echo(cfg);
    out.report_json = cfg.output_dir / "report.json";
    write_text(out.report_json, report.dump(2) + "\n");
    write_text(cfg.output_dir / "config.cfg", stored_echo(cfg));
    return out;
}

StudyOutput run_study(const RunConfig& cfg) {
    if (!cfg.seed) throw ConfigError("study requires a seed");
    check_grid(cfg);
    const auto cells = enumerate_cells(cfg, *cfg.seed);
    const auto t0 = std::chrono::steady_clock::now();
    const std::string tag(to_string(cfg.prior_case));

    StudyOutput out;
    out.cells.resize(cells.size());
    std::vector<std::string> chain_files(cells.size());
    parallel_for(cells.size(), cfg.workers, [&](std::size_t i) {
        CellResult r = run_cell(cfg, cells[i]);
        if (r.ok && cfg.write_chains) {
            const auto path = cfg.output_dir / "chains" / ("chain_" + tag + "_" + cell_tag(cells[i]) + ".csv");
            try {
                write_chain_csv(path, r.estimation->chain);
                chain_files[i] = std::filesystem::relative(path, cfg.output_dir).string();
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
        }
        out.cells[i] = std::move(r);
    });

    const auto names = ModelSpec::parameter_names(cfg.alpha0.size(), cfg.beta0.size());
    std::ostringstream csv;
    csv << "case,d0,nu0,replicate,parameter,truth,mean,sd,ci_lower,ci_upper,bias,ape,ape_gt_10pct,truth_in_ci,"
           "acceptance_rate,first_stage_estimate,status,error\n";
    for (const auto& r : out.cells) {
        const auto truth = truth_for(cfg, r.cell.d0, r.cell.nu0).to_vector();
        for (std::size_t i = 0; i < names.size(); ++i) {
            csv << tag << ',' << format_double(r.cell.d0) << ',' << format_double(r.cell.nu0) << ','
                << r.cell.replicate << ',' << names[i] << ',' << format_double(truth[i]) << ',';
            if (r.ok) {
                const auto& s = r.estimation->summaries[i];
                const auto& est = *r.estimation;
                csv << format_double(s.mean) << ',' << format_double(s.sd) << ',' << format_double(s.ci_lower) << ','
                    << format_double(s.ci_upper) << ',' << format_double(*s.bias) << ',' << format_double(*s.ape)
                    << ',' << (s.ape_gt_10pct() ? "true" : "false") << ',' << (s.truth_in_ci() ? "true" : "false")
                    << ',' << format_double(est.chain.acceptance_rate(i)) << ','
                    << (est.first_stage_estimate ? format_double(*est.first_stage_estimate) : "") << ",ok,\n";
            } else {
                csv << ",,,,,,,,,,failed," << csv_field(r.error) << '\n';
            }
        }
    }
    out.table_csv = cfg.output_dir / ("study_" + tag + ".csv");
    write_text(out.table_csv, csv.str());

    json report;
    report["mode"] = "study";
    report["case"] = tag;
    report["seed"] = *cfg.seed;
    report["config_hash"] = config_hash(cfg);
    report["seed_rule"] = "cell k: series derive_seed(seed, 2k), chain derive_seed(seed, 2k + 1)";
    json jc = json::array();
    std::size_t failed = 0;
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
        const auto& r = out.cells[i];
        json c;
        c["cell"] = r.cell.index;
        c["d0"] = r.cell.d0;
        c["nu0"] = r.cell.nu0;
        c["replicate"] = r.cell.replicate;
        c["series_seed"] = r.cell.seeds.series;
        c["chain_seed"] = r.cell.seeds.chain;
        c["status"] = r.ok ? "ok" : "failed";
        if (!r.ok) {
            c["error"] = r.error;
            ++failed;
        } else {
            const auto& est = *r.estimation;
            c["initial"] = spec_json(est.init);
            c["acceptance_rates"] = acceptance_json(est.chain);
            c["draws"] = est.chain.size();
            if (est.first_stage) {
                c["first_stage"] = std::string(to_string(*est.first_stage));
                c["first_stage_estimate"] = *est.first_stage_estimate;
            }
            c["seconds"] = est.seconds;
            if (!chain_files[i].empty()) c["chain_file"] = chain_files[i];
        }
        jc.push_back(c);
    }
    report["cells"] = jc;
    report["failed_cells"] = failed;
    report["table"] = out.table_csv.filename().string();
    report["seconds"] = seconds_since(t0);
    report["config"] = stored_echo(cfg);
    out.report_json = cfg.output_dir / "report.json";
    write_text(out.report_json, report.dump(2) + "\n");
    write_text(cfg.output_dir / "config.cfg", stored_echo(cfg));
    return out;
}

std::vector<ExampleView> example_views(const Chain& full, std::size_t burn_in, std::size_t thinning,
                                       std::size_t n_draws, const std::optional<ModelSpec>& truth) {
    std::vector<ExampleView> views(3);
    views[0].name = "entire";
    views[0].chain = full;
    views[1].name = "thinned";
    views[1].chain = full.view(burn_in, thinning, n_draws);
    views[2].name = "unthinned";
    views[2].chain = full.view(burn_in, 1, n_draws);
    std::vector<double> tv;
    if (truth) tv = truth->to_vector();
    for (auto& v : views) {
        if (v.chain.size() == 0) throw SizingError("example: the " + v.name + " view is empty");
        v.summaries = truth ? summarize(v.chain, std::span<const double>(tv)) : summarize(v.chain);
    }
    return views;
}

ExampleOutput run_example(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    check_grid(cfg);
    cfg.seed = resolve_seed(cfg);
    if (cfg.n_iter <= cfg.burn_in) throw ConfigError("example: n_iter must exceed burn_in");
    RunConfig full_cfg = cfg;
    full_cfg.burn_in = 0;
    full_cfg.thinning = 1;
    const auto cells = enumerate_cells(cfg, *cfg.seed);
    const std::optional<PriorCatalog> catalog =
        cfg.prior_case == CaseLabel::C1 ? std::optional<PriorCatalog>(example_catalog()) : std::nullopt;

    ExampleOutput out;
    out.cells.resize(cells.size());
    std::vector<Estimation> ests(cells.size());
    parallel_for(cells.size(), cfg.workers, [&](std::size_t i) {
        const Cell& c = cells[i];
        const ModelSpec truth = truth_for(cfg, c.d0, c.nu0);
        const SimulatedSeries series = simulate(truth, cfg.n, cfg.m_star, c.seeds.series, cfg.sim_presample);
        ests[i] = estimate_with(full_cfg, series.x, truth, c.seeds.chain, 1, catalog);
        out.cells[i].cell = c;
        out.cells[i].views = example_views(ests[i].chain, cfg.burn_in, cfg.thinning, cfg.example_draws, truth);
    });

    std::ostringstream csv;
    csv << "d0,nu0,replicate,chain,parameter,draws,mean,sd,ci_lower,ci_upper,truth,bias,ape\n";
    json report;
    report["mode"] = "example";
    report["seed"] = *cfg.seed;
    report["config_hash"] = config_hash(cfg);
    json jc = json::array();
    for (std::size_t ci = 0; ci < out.cells.size(); ++ci) {
        const auto& ec = out.cells[ci];
        const std::string ctag = cell_tag(ec.cell);
        json c;
        c["d0"] = ec.cell.d0;
        c["nu0"] = ec.cell.nu0;
        c["replicate"] = ec.cell.replicate;
        c["series_seed"] = ec.cell.seeds.series;
        c["chain_seed"] = ec.cell.seeds.chain;
        c["initial"] = spec_json(ests[ci].init);
        c["acceptance_rates"] = acceptance_json(ests[ci].chain);
        c["seconds"] = ests[ci].seconds;
        json views = json::object();
        for (const auto& v : ec.views) {
            views[v.name] = v.chain.size();
            for (const auto& s : v.summaries) {
                csv << format_double(ec.cell.d0) << ',' << format_double(ec.cell.nu0) << ',' << ec.cell.replicate << ','
                    << v.name << ',' << s.name << ',' << v.chain.size() << ',' << format_double(s.mean) << ','
                    << format_double(s.sd) << ',' << format_double(s.ci_lower) << ',' << format_double(s.ci_upper)
                    << ',' << format_double(*s.truth) << ',' << format_double(*s.bias) << ','
                    << format_double(*s.ape) << '\n';
            }
            if (cfg.write_chains) write_chain_csv(cfg.output_dir / ("example_" + ctag + "_" + v.name + ".csv"), v.chain);
            for (std::size_t i = 0; i < v.chain.dimension(); ++i) {
                const auto col = v.chain.column(i);
                const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
                double lo = *lo_it;
                double hi = *hi_it;
                const std::string stem = ctag + "_" + v.name + "_" + v.chain.names[i] + ".csv";
                const double h = silverman_bandwidth(col);
                if (h > 0.0 && cfg.kde_points >= 2) {
                    std::vector<double> grid(cfg.kde_points);
                    const double a = lo - 3.0 * h;
                    const double b = hi + 3.0 * h;
                    for (std::size_t g = 0; g < grid.size(); ++g) {
                        grid[g] = a + (b - a) * static_cast<double>(g) / static_cast<double>(grid.size() - 1);
                    }
                    const auto dens = density_estimate(col, grid, h);
                    std::ostringstream k;
                    k << "x,density\n";
                    for (std::size_t g = 0; g < grid.size(); ++g) {
                        k << format_double(grid[g]) << ',' << format_double(dens[g]) << '\n';
                    }
                    write_text(cfg.output_dir / ("kde_" + stem), k.str());
                }
                if (cfg.hist_bins > 0) {
                    if (!(hi > lo)) {
                        lo -= 0.5;
                        hi += 0.5;
                    }
                    const Histogram hist = histogram(col, cfg.hist_bins, lo, hi);
                    const double w = (hist.upper - hist.lower) / static_cast<double>(hist.counts.size());
                    std::ostringstream k;
                    k << "lower,upper,count,density\n";
                    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
                        k << format_double(hist.lower + w * static_cast<double>(b)) << ','
                          << format_double(b + 1 == hist.counts.size() ? hist.upper
                                                                       : hist.lower + w * static_cast<double>(b + 1))
                          << ',' << hist.counts[b] << ',' << format_double(hist.density[b]) << '\n';
                    }
                    write_text(cfg.output_dir / ("hist_" + stem), k.str());
                }
            }
        }
        c["views"] = views;
        jc.push_back(c);
    }
    report["cells"] = jc;
    report["config"] = stored_echo(cfg);
    out.table_csv = cfg.output_dir / "example_table.csv";
    write_text(out.table_csv, csv.str());
    write_text(cfg.output_dir / "report.json", report.dump(2) + "\n");
    write_text(cfg.output_dir / "config.cfg", stored_echo(cfg));
    return out;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

void error_line(std::ostream& err, const std::string& kind, const std::string& message) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    err << j.dump() << '\n';
}

}  // namespace

int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian estimation of FIEGARCH(p, d, q) models with GED innovations", "fiegarch"};
    app.require_subcommand(1, 1);

    std::map<std::string, std::string> values;
    std::string config_path;
    struct Sub {
        Mode mode;
        CLI::App* app;
        std::vector<std::pair<std::string, CLI::Option*>> options;
    };
    std::vector<Sub> subs;
    const std::vector<std::pair<Mode, std::string>> descriptions{
        {Mode::Simulate, "simulate FIEGARCH series over the (d0, nu0) grid"},
        {Mode::Estimate, "estimate one series from a CSV file"},
        {Mode::Study, "simulate and estimate every cell of the (d0, nu0) grid"},
        {Mode::Example, "one long chain summarized as entire, thinned and unthinned samples"}};
    std::vector<std::string> flag_keys = config_keys();
    for (const char* name : {"nu", "d", "theta", "gamma", "omega"}) {
        for (const char* field : {"sd", "lower", "upper"}) {
            flag_keys.push_back(std::string("kernel_") + name + "_" + field);
        }
    }
    for (const auto& [mode, text] : descriptions) {
        Sub s{mode, app.add_subcommand(std::string(to_string(mode)), text), {}};
        s.app->add_option("--config", config_path, "flat key = value file; flags override it");
        for (const auto& key : flag_keys) {
            s.options.emplace_back(key, s.app->add_option("--" + key, values[key]));
        }
        subs.push_back(std::move(s));
    }

    std::vector<std::string> argv_store = args;
    argv_store.insert(argv_store.begin(), "fiegarch");
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        error_line(err, "usage", e.what());
        return 2;
    }

    try {
        const Sub* chosen = nullptr;
        for (const auto& s : subs) {
            if (s.app->parsed()) chosen = &s;
        }
        if (chosen->app->get_subcommands().empty() && chosen->app->get_help_ptr() &&
            chosen->app->get_help_ptr()->count() > 0) {
            out << chosen->app->help();
            return 0;
        }
        KeyValues kv;
        if (!config_path.empty()) kv = read_config_file(config_path);
        for (const auto& [key, opt] : chosen->options) {
            if (opt->count() > 0) kv[key] = values[key];
        }
        if (!kv.count("output_dir")) {
            if (const char* env = std::getenv("FIEGARCH_OUTPUT_DIR"); env && *env) kv["output_dir"] = env;
        }
        const RunConfig cfg = parse_config(chosen->mode, kv);
        switch (cfg.mode) {
            case Mode::Simulate: {
                const auto res = run_simulate(cfg);
                out << "wrote " << res.files.size() << " series and " << res.manifest.string() << '\n';
                break;
            }
            case Mode::Estimate: {
                const auto res = run_estimate(cfg);
                out << "wrote " << res.chain_csv.string() << ", " << res.summary_json.string() << ", "
                    << res.report_json.string() << '\n';
                break;
            }
            case Mode::Study: {
                const auto res = run_study(cfg);
                const auto failed = std::count_if(res.cells.begin(), res.cells.end(),
                                                  [](const CellResult& r) { return !r.ok; });
                out << "wrote " << res.table_csv.string() << " (" << res.cells.size() << " cells, " << failed
                    << " failed)\n";
                break;
            }
            case Mode::Example: {
                const auto res = run_example(cfg);
                out << "wrote " << res.table_csv.string() << '\n';
                break;
            }
        }
        return 0;
    } catch (const ConfigError& e) {
        error_line(err, e.kind(), e.what());
        return 2;
    } catch (const Error& e) {
        error_line(err, e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        error_line(err, "internal", e.what());
        return 1;
    }
}

}  // namespace fiegarch
