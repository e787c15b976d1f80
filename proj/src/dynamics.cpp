#include "duplexsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace duplexsim {

Population init_population(std::uint32_t n, int k, RandomStream& rng) {
    if (n < 2) throw std::invalid_argument("init_population: n must be >= 2");
    if (k < 2) throw std::invalid_argument("init_population: k must be >= 2");
    Population pop;
    pop.k = k;
    pop.agents.resize(n);
    for (auto& agent : pop.agents) {
        agent.k = k;
        agent.preference.resize(k);
        for (double& v : agent.preference) v = rng.uniform(-1.0, 1.0);
        agent.association.assign(static_cast<std::size_t>(k) * k, 1.0);
    }
    return pop;
}

std::vector<double> softmax_probabilities(std::span<const double> v) {
    std::vector<double> probs(v.size());
    const double peak = *std::max_element(v.begin(), v.end());
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        probs[i] = std::exp(v[i] - peak);
        total += probs[i];
    }
    for (double& p : probs) p /= total;
    return probs;
}

int exhibit_single(const AgentState& agent, RandomStream& rng) {
    const auto probs = softmax_probabilities(agent.preference);
    return rng.categorical(probs);
}

std::pair<int, int> exhibit_pair(const AgentState& agent, RandomStream& rng) {
    const int k = agent.k;
    const auto probs = softmax_probabilities(agent.preference);
    const int i = rng.categorical(probs);
    // a fresh softmax over the remaining entries, not a renormalized slice of
    // the first one: the slice degenerates to 0/0 when probs[i] rounds to 1
    std::vector<double> remaining(static_cast<std::size_t>(k) - 1);
    for (int idx = 0, out = 0; idx < k; ++idx)
        if (idx != i) remaining[out++] = agent.preference[idx];
    const int draw = rng.categorical(softmax_probabilities(remaining));
    const int j = draw < i ? draw : draw + 1;
    return {i, j};
}

double constraint_satisfaction(std::span<const double> v, std::span<const double> r,
                               const ModelConfig& cfg, bool* fell_back) {
    const int k = static_cast<int>(v.size());
    if (r.size() != static_cast<std::size_t>(k) * k)
        throw std::invalid_argument("constraint_satisfaction: R is not KxK");
    if (fell_back) *fell_back = false;

    double scale = 1.0;
    if (cfg.cs_normalize) {
        const double peak = *std::max_element(r.begin(), r.end());
        if (peak > 0.0) {
            scale = 1.0 / peak;
        } else if (fell_back) {
            *fell_back = true;
        }
    }

    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        const double vi = v[i];
        for (int j = 0; j < k; ++j) {
            if (i == j && !cfg.cs_include_diagonal) continue;
            const double omega = std::abs(vi - v[j]);
            total += std::abs(r[static_cast<std::size_t>(i) * k + j] * scale - omega);
        }
    }
    return 2.0 * total / (static_cast<double>(k) * (k - 1));
}

double constraint_satisfaction(const AgentState& agent, const ModelConfig& cfg, bool* fell_back) {
    return constraint_satisfaction(agent.preference, agent.association, cfg, fell_back);
}

namespace {

bool retention_accepts(double proposed, double current, Retention retention) {
    return retention == Retention::greater ? proposed > current : proposed < current;
}

}  // namespace

StepOutcome association_step(Population& pop, const DuplexNetwork& net,
                             const ModelConfig& cfg, RandomStream& rng) {
    StepOutcome outcome;
    const NodeId observer = static_cast<NodeId>(rng.uniform_below(pop.size()));
    outcome.observer = observer;

    const auto& senders = out_neighbors(net, 1, observer);
    if (senders.empty()) return outcome;  // kind stays skipped
    const NodeId sender = senders[rng.uniform_below(senders.size())];
    outcome.kind = StepKind::association;
    outcome.sender = sender;

    const auto [i, j] = exhibit_pair(pop.agents[sender], rng);
    outcome.practice_i = i;
    outcome.practice_j = j;

    AgentState& b = pop.agents[observer];
    b.r(i, j) += 1.0;
    if (cfg.symmetric_r) b.r(j, i) += 1.0;

    // nudge the weaker of the two exhibited preferences, smaller index on ties
    const double mag_i = std::abs(b.preference[i]);
    const double mag_j = std::abs(b.preference[j]);
    int weaker;
    if (mag_i < mag_j)
        weaker = i;
    else if (mag_j < mag_i)
        weaker = j;
    else
        weaker = std::min(i, j);

    bool fell_back = false;
    const double current = constraint_satisfaction(b, cfg, &fell_back);
    const double saved = b.preference[weaker];
    double proposal = saved + rng.normal();
    if (cfg.bounded_preferences) proposal = std::clamp(proposal, -1.0, 1.0);
    b.preference[weaker] = proposal;
    const double proposed = constraint_satisfaction(b, cfg);
    if (retention_accepts(proposed, current, cfg.retention)) {
        outcome.proposal_retained = true;
    } else {
        b.preference[weaker] = saved;
    }
    outcome.cs_fallback = fell_back;
    return outcome;
}

StepOutcome preference_step(Population& pop, const DuplexNetwork& net,
                            const ModelConfig& cfg, RandomStream& rng) {
    StepOutcome outcome;
    const NodeId observer = static_cast<NodeId>(rng.uniform_below(pop.size()));
    outcome.observer = observer;

    const auto& senders = out_neighbors(net, 2, observer);
    if (senders.empty()) return outcome;
    const NodeId sender = senders[rng.uniform_below(senders.size())];
    outcome.kind = StepKind::preference;
    outcome.sender = sender;

    const int i = exhibit_single(pop.agents[sender], rng);
    outcome.practice_i = i;

    AgentState& b = pop.agents[observer];
    b.preference[i] += 1.0;

    const int k = b.k;
    std::vector<double> saved_row(k), saved_col(k);
    for (int j = 0; j < k; ++j) {
        saved_row[j] = b.r(i, j);
        saved_col[j] = b.r(j, i);
    }

    bool fell_back = false;
    const double current = constraint_satisfaction(b, cfg, &fell_back);
    for (int j = 0; j < k; ++j) b.r(i, j) += rng.normal();
    if (cfg.symmetric_r)
        for (int j = 0; j < k; ++j)
            if (j != i) b.r(j, i) = b.r(i, j);
    const double proposed = constraint_satisfaction(b, cfg);
    if (retention_accepts(proposed, current, cfg.retention)) {
        outcome.proposal_retained = true;
    } else {
        for (int j = 0; j < k; ++j) {
            b.r(i, j) = saved_row[j];
            b.r(j, i) = saved_col[j];
        }
    }
    outcome.cs_fallback = fell_back;
    return outcome;
}

StepOutcome step(Population& pop, const DuplexNetwork& net,
                 const ModelConfig& cfg, RandomStream& rng) {
    if (rng.uniform01() < cfg.alpha) return preference_step(pop, net, cfg, rng);
    return association_step(pop, net, cfg, rng);
}

void run(Population& pop, const DuplexNetwork& net, const ModelConfig& cfg,
         std::uint64_t sample_every, const SampleSink& sample,
         RandomStream& rng, const TraceSink& trace) {
    if (sample_every == 0) throw std::invalid_argument("run: sample_every must be >= 1");
    if (pop.size() != net.n)
        throw std::invalid_argument("run: population size differs from network size");

    std::uint64_t skipped = 0;
    if (sample) sample(RunProgress{0, 0}, pop);
    for (std::uint64_t t = 1; t <= cfg.steps; ++t) {
        const StepOutcome outcome = step(pop, net, cfg, rng);
        if (outcome.kind == StepKind::skipped) ++skipped;
        if (trace) trace(t, outcome);
        if ((t % sample_every == 0 || t == cfg.steps) && sample)
            sample(RunProgress{t, skipped}, pop);
    }
}

Population run(const DuplexNetwork& net, const ModelConfig& cfg,
               std::uint64_t sample_every, const SampleSink& sample,
               const TraceSink& trace) {
    RandomStream rng(cfg.master_seed);
    Population pop = init_population(net.n, cfg.k, rng);
    run(pop, net, cfg, sample_every, sample, rng, trace);
    return pop;
}

}  // namespace duplexsim
