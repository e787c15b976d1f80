#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "duplexsim/network.hpp"
#include "duplexsim/rng.hpp"

namespace duplexsim {

enum class Retention { greater, less };
enum class MiMode { sequential, association_coupled };

struct ModelConfig {
    double alpha = 0.0;             // per-round probability of a preference step
    int k = 6;                      // number of practices
    std::uint64_t steps = 100000;
    bool symmetric_r = true;        // mirror R updates across the diagonal
    bool cs_normalize = true;       // evaluate CS on R/max(R) instead of raw R
    bool cs_include_diagonal = false;
    // Clamp association-step preference proposals to the initialization range
    // [-1, 1]. Contagion increments are never clamped. With raw unbounded
    // proposals (off) the association channel loses its polarizing effect:
    // once R outgrows |V_i - V_j| every practice pair pulls preferences
    // together and the population stalls at the random-pair correlation
    // level.
    bool bounded_preferences = true;
    Retention retention = Retention::greater;
    MiMode mi_mode = MiMode::sequential;
    std::uint64_t master_seed = 0;
};

// One agent: preference vector V over k practices and perceived
// association matrix R (k x k, row-major).
struct AgentState {
    int k = 0;
    std::vector<double> preference;
    std::vector<double> association;

    double r(int i, int j) const { return association[static_cast<std::size_t>(i) * k + j]; }
    double& r(int i, int j) { return association[static_cast<std::size_t>(i) * k + j]; }
};

struct Population {
    int k = 0;
    std::vector<AgentState> agents;
    std::size_t size() const { return agents.size(); }
};

enum class StepKind { association, preference, skipped };

// Trace record for one simulation round.
struct StepOutcome {
    StepKind kind = StepKind::skipped;
    NodeId observer = 0;
    std::optional<NodeId> sender;
    int practice_i = -1;
    int practice_j = -1;            // -1 on preference and skipped steps
    bool proposal_retained = false;
    bool cs_fallback = false;       // cs_normalize requested with max(R) <= 0
};

// R all ones, V entries independent Unif[-1, 1).
Population init_population(std::uint32_t n, int k, RandomStream& rng);

// Stable softmax (max-subtracted); entries positive, sum 1.
std::vector<double> softmax_probabilities(std::span<const double> v);

// Ordered pair (i, j), i != j: i from softmax(V), j from softmax over the
// remaining practices.
std::pair<int, int> exhibit_pair(const AgentState& agent, RandomStream& rng);

// Single practice from softmax(V).
int exhibit_single(const AgentState& agent, RandomStream& rng);

// (2 / (K(K-1))) * sum_{i != j} |R'_ij - |V_i - V_j||, where R' is R or
// R/max(R) under cfg.cs_normalize. Diagonal terms join the sum only when
// cfg.cs_include_diagonal. When normalization is requested but max(R) <= 0,
// falls back to raw R and sets *fell_back.
double constraint_satisfaction(std::span<const double> v, std::span<const double> r,
                               const ModelConfig& cfg, bool* fell_back = nullptr);
double constraint_satisfaction(const AgentState& agent, const ModelConfig& cfg,
                               bool* fell_back = nullptr);

// One association-transmission round: observer B picks sender A on layer 1,
// A exhibits (i, j), B increments R_ij (and R_ji when symmetric), then
// proposes a Gaussian nudge of the weaker of V_i, V_j, kept only if CS moves
// in the configured direction.
StepOutcome association_step(Population& pop, const DuplexNetwork& net,
                             const ModelConfig& cfg, RandomStream& rng);

// One preference-transmission round: observer B picks sender A on layer 2,
// A exhibits i, B's V_i increases by 1 unconditionally, then row i of R takes
// a Gaussian proposal, kept only if CS moves in the configured direction.
StepOutcome preference_step(Population& pop, const DuplexNetwork& net,
                            const ModelConfig& cfg, RandomStream& rng);

// Bernoulli(alpha) chooses preference_step, otherwise association_step.
StepOutcome step(Population& pop, const DuplexNetwork& net,
                 const ModelConfig& cfg, RandomStream& rng);

struct RunProgress {
    std::uint64_t t = 0;
    std::uint64_t skipped_steps = 0;
};

using SampleSink = std::function<void(const RunProgress&, const Population&)>;
using TraceSink = std::function<void(std::uint64_t t, const StepOutcome&)>;

// Executes cfg.steps rounds on an already-initialized population, invoking
// sample at t = 0, every sample_every rounds, and at t = cfg.steps.
// The rng must be the stream the population was initialized from when
// reproducing a seeded run.
void run(Population& pop, const DuplexNetwork& net, const ModelConfig& cfg,
         std::uint64_t sample_every, const SampleSink& sample,
         RandomStream& rng, const TraceSink& trace = {});

// Convenience overload: seeds a fresh stream from cfg.master_seed, builds the
// population with init_population, runs, and returns the final population.
Population run(const DuplexNetwork& net, const ModelConfig& cfg,
               std::uint64_t sample_every, const SampleSink& sample,
               const TraceSink& trace = {});

}  // namespace duplexsim
