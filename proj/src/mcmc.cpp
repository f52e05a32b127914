#include "fiegarch/mcmc.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <thread>

#include "fiegarch/errors.hpp"

namespace fiegarch {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void KernelSpec::validate() const {
    for (const auto& slot : slots) slot.validate();
}

KernelSpec KernelSpec::defaults(CaseLabel label, std::size_t p, std::size_t q) {
    KernelSpec k;
    k.slots = {{0.5, 0.0, 10.0}, {0.025, 0.0, 0.5}, {0.05, -1.0, 0.0}, {0.05, 0.0, 1.0}, {1.5, -15.0, 15.0}};
    if (samples_d_on_phi_scale(label)) k.slots[kD] = {1.0, -10.0, 10.0};
    for (std::size_t i = 0; i < p + q; ++i) k.slots.push_back({0.05, -1.0, 1.0});
    return k;
}

FiegarchTarget::FiegarchTarget(std::vector<double> data, PriorCatalog catalog, std::size_t p,
                               std::size_t q, PresampleConvention convention)
    : data_(std::move(data)),
      catalog_(std::move(catalog)),
      p_(p),
      q_(q),
      convention_(convention),
      d_on_phi_(samples_d_on_phi_scale(catalog_.label)) {
    if (data_.empty()) throw SizingError("target: empty data series");
    if (catalog_.priors.size() != 5 + p + q) {
        throw SizingError("target: prior catalog has " + std::to_string(catalog_.priors.size()) +
                          " entries, expected " + std::to_string(5 + p + q));
    }
    for (const auto& prior : catalog_.priors) prior.validate();
    if (d_on_phi_ && catalog_.priors[kD].kind != PriorKind::GaussianOnPhi &&
        catalog_.priors[kD].kind != PriorKind::Uniform) {
        throw HyperparameterError("target: d prior kind does not fit the phi sampling scale");
    }
}

double FiegarchTarget::to_natural(std::size_t i, double state_value) const {
    return (i == kD && d_on_phi_) ? phi(state_value) : state_value;
}

double FiegarchTarget::to_sampling(std::size_t i, double natural_value) const {
    return (i == kD && d_on_phi_) ? phi_inverse(natural_value) : natural_value;
}

const CoefficientTable& FiegarchTarget::table_for(const ModelSpec& spec) {
    std::vector<double> key{spec.d};
    key.insert(key.end(), spec.alpha.begin(), spec.alpha.end());
    key.insert(key.end(), spec.beta.begin(), spec.beta.end());
    for (auto it = tables_.begin(); it != tables_.end(); ++it) {
        if (it->first == key) {
            std::rotate(it, it + 1, tables_.end());
            return *tables_.back().second;
        }
    }
    // Two entries cover the current state and one pending proposal.
    if (tables_.size() >= 2) tables_.erase(tables_.begin());
    tables_.emplace_back(std::move(key), std::make_unique<CoefficientTable>(estimation_table(spec, data_.size())));
    return *tables_.back().second;
}

double FiegarchTarget::log_likelihood(const ModelSpec& spec) {
    if (!(spec.nu > 0.0) || !(spec.d < 0.5) || (spec.theta == 0.0 && spec.gamma == 0.0)) return kNegInf;
    const CoefficientTable& table = table_for(spec);
    try {
        const double ll = fiegarch::log_likelihood(spec, data_, table, convention_);
        return std::isfinite(ll) ? ll : kNegInf;
    } catch (const FilterError&) {
        return kNegInf;
    }
}

double FiegarchTarget::log_density(std::span<const double> state) {
    double lp = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        lp += log_prior_on_sampling_scale(catalog_.priors[i], state[i]);
        if (!(lp > kNegInf)) return kNegInf;
    }
    std::vector<double> eta(state.begin(), state.end());
    eta[kD] = to_natural(kD, eta[kD]);
    const ModelSpec spec = ModelSpec::from_vector(eta, p_, q_);
    return lp + log_likelihood(spec);
}

std::vector<double> Chain::column(std::size_t i) const {
    std::vector<double> out(size());
    for (std::size_t r = 0; r < size(); ++r) out[r] = draws[r * dimension() + i];
    return out;
}

Chain Chain::view(std::size_t b, std::size_t t, std::size_t max_draws) const {
    if (t == 0) throw SizingError("chain view: thinning must be at least 1");
    Chain out;
    out.names = names;
    out.n_iter = n_iter;
    out.burn_in = b;
    out.thinning = t;
    out.accepted = accepted;
    out.proposals = proposals;
    out.seed = seed;
    out.initial = initial;
    for (std::size_t r = 0; r < size() && out.size() < max_draws; ++r) {
        const std::size_t m = iterations[r];
        if (m > b && (m - b - 1) % t == 0) {
            out.iterations.push_back(m);
            const auto rw = row(r);
            out.draws.insert(out.draws.end(), rw.begin(), rw.end());
        }
    }
    return out;
}

Chain gibbs_run(Target& target, const KernelSpec& kernel, std::span<const double> init,
                const ChainSettings& settings, std::uint64_t seed) {
    const std::size_t k = target.dimension();
    if (init.size() != k || kernel.slots.size() != k) {
        throw SizingError("gibbs_run: initial vector and kernel must match the target dimension");
    }
    kernel.validate();
    if (settings.thinning == 0) throw SizingError("gibbs_run: thinning must be at least 1");
    if (settings.n_iter <= settings.burn_in) {
        throw SizingError("gibbs_run: n_iter must exceed burn_in");
    }

    std::vector<double> state(k);
    for (std::size_t i = 0; i < k; ++i) {
        state[i] = target.to_sampling(i, init[i]);
        const auto& slot = kernel.slots[i];
        if (!(state[i] >= slot.lower && state[i] <= slot.upper)) {
            throw InitializationError("gibbs_run: initial value of " + target.names()[i] +
                                      " lies outside its kernel limits");
        }
    }
    double current = target.log_density(state);
    if (!std::isfinite(current)) {
        throw SamplerStateError("gibbs_run: log target is not finite at the initial state");
    }

    Chain chain;
    chain.names = target.names();
    chain.n_iter = settings.n_iter;
    chain.burn_in = settings.burn_in;
    chain.thinning = settings.thinning;
    chain.accepted.assign(k, 0);
    chain.proposals.assign(k, 0);
    chain.seed = seed;
    chain.initial.assign(init.begin(), init.end());
    const std::size_t expected = (settings.n_iter - settings.burn_in - 1) / settings.thinning + 1;
    chain.draws.reserve(expected * k);
    chain.iterations.reserve(expected);

    Rng rng(seed);
    for (std::size_t m = 1; m <= settings.n_iter; ++m) {
        for (std::size_t i = 0; i < k; ++i) {
            const double saved = state[i];
            auto log_target = [&](double v) {
                state[i] = v;
                const double lt = target.log_density(state);
                state[i] = saved;
                return lt;
            };
            const StepResult step = metropolis_step(saved, current, log_target, kernel.slots[i], rng,
                                                    settings.hastings);
            state[i] = step.value;
            current = step.log_target;
            ++chain.proposals[i];
            if (step.accepted) ++chain.accepted[i];
        }
        if (m > settings.burn_in && (m - settings.burn_in - 1) % settings.thinning == 0) {
            chain.iterations.push_back(m);
            for (std::size_t i = 0; i < k; ++i) {
                const auto& slot = kernel.slots[i];
                if (!(state[i] >= slot.lower && state[i] <= slot.upper)) {
                    throw SamplerStateError("gibbs_run: draw left its kernel limits");
                }
                chain.draws.push_back(target.to_natural(i, state[i]));
            }
        }
    }
    return chain;
}

Chain gibbs_run(std::span<const double> data, const PriorCatalog& catalog, const KernelSpec& kernel,
                const ModelSpec& init, const ChainSettings& settings, std::uint64_t seed,
                PresampleConvention convention) {
    FiegarchTarget target(std::vector<double>(data.begin(), data.end()), catalog, init.p(), init.q(),
                          convention);
    const std::vector<double> eta = init.to_vector();
    for (std::size_t i = 0; i < eta.size(); ++i) {
        if (!(log_prior(catalog.priors[i], eta[i]) > kNegInf)) {
            throw InitializationError("gibbs_run: initial value of " + target.names()[i] +
                                      " lies outside its prior support");
        }
    }
    return gibbs_run(target, kernel, eta, settings, seed);
}

ParameterGrid ParameterGrid::defaults(std::span<const double> data) {
    ParameterGrid g;
    g.nu = {1.0, 2.0, 3.0, 5.0};
    g.d = {0.05, 0.15, 0.25, 0.35, 0.45};
    g.theta = {-0.3, -0.15, -0.05};
    g.gamma = {0.1, 0.25, 0.4};
    double c = 0.0;
    if (data.size() >= 2) {
        const double mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
        double ss = 0.0;
        for (double x : data) ss += (x - mean) * (x - mean);
        const double var = ss / static_cast<double>(data.size() - 1);
        if (var > 0.0) c = std::log(var);
    }
    g.omega = {c - 1.0, c, c + 1.0};
    return g;
}

ModelSpec grid_initialize(std::span<const double> data, const ParameterGrid& grid,
                          PresampleConvention convention, std::size_t workers) {
    if (grid.size() == 0) throw InitializationError("grid_initialize: every parameter needs at least one value");
    if (data.empty()) throw InitializationError("grid_initialize: empty data series");

    // One slot per d value; each worker owns its tables and filters.
    struct Best {
        double ll = kNegInf;
        ModelSpec spec;
    };
    std::vector<Best> best(grid.d.size());
    auto evaluate_d = [&](std::size_t di) {
        ModelSpec spec;
        spec.d = grid.d[di];
        spec.alpha = grid.alpha;
        spec.beta = grid.beta;
        if (!(spec.d < 0.5)) return;
        const CoefficientTable table = estimation_table(spec, data.size());
        for (double nu : grid.nu) {
            for (double theta : grid.theta) {
                for (double gamma : grid.gamma) {
                    for (double omega : grid.omega) {
                        spec.nu = nu;
                        spec.theta = theta;
                        spec.gamma = gamma;
                        spec.omega = omega;
                        if (!(nu > 0.0) || (theta == 0.0 && gamma == 0.0)) continue;
                        double ll = kNegInf;
                        try {
                            ll = log_likelihood(spec, data, table, convention);
                        } catch (const FilterError&) {
                        }
                        if (std::isfinite(ll) && ll > best[di].ll) best[di] = {ll, spec};
                    }
                }
            }
        }
    };

    const std::size_t n_workers = std::clamp<std::size_t>(workers, 1, grid.d.size());
    if (n_workers == 1) {
        for (std::size_t di = 0; di < grid.d.size(); ++di) evaluate_d(di);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t di = w; di < grid.d.size(); di += n_workers) evaluate_d(di);
            });
        }
        for (auto& th : pool) th.join();
    }

    // Reduce in nu-major enumeration order so ties resolve identically to a
    // sequential scan regardless of worker count.
    const Best* winner = nullptr;
    auto order = [&](const ModelSpec& s) {
        const auto idx = [](const std::vector<double>& v, double x) {
            return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
        };
        return std::array<std::size_t, 5>{idx(grid.nu, s.nu), idx(grid.d, s.d), idx(grid.theta, s.theta),
                                           idx(grid.gamma, s.gamma), idx(grid.omega, s.omega)};
    };
    for (const auto& b : best) {
        if (!std::isfinite(b.ll)) continue;
        if (winner == nullptr || b.ll > winner->ll ||
            (b.ll == winner->ll && order(b.spec) < order(winner->spec))) {
            winner = &b;
        }
    }
    if (winner == nullptr) throw InitializationError("grid_initialize: no grid point has a finite likelihood");
    return winner->spec;
}

}  // namespace fiegarch
