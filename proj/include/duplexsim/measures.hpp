#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "duplexsim/dynamics.hpp"
#include "duplexsim/rng.hpp"

namespace duplexsim {

// Mean over unordered agent pairs; pairs whose Pearson correlation is
// undefined (zero variance) are excluded and counted.
struct PairwiseStat {
    std::optional<double> mean;     // empty when every pair was excluded
    std::uint64_t excluded_pairs = 0;
    std::uint64_t total_pairs = 0;
};

// Population-level snapshot of the four measures. excluded_pairs sums the
// zero-variance exclusions of the preference-pair and association-pair
// correlations (a fresh population excludes every association pair because
// all R matrices are constant).
struct MeasurementRecord {
    std::uint64_t t = 0;
    std::optional<double> pref_similarity;
    std::optional<double> pref_congruence;
    std::optional<double> assoc_similarity;
    double mean_mutual_info = 0.0;
    std::uint64_t excluded_pairs = 0;
};

// Probability matrix over ordered practice pairs, diagonal zero.
struct JointExhibitDistribution {
    int k = 0;
    std::vector<double> p;          // k x k row-major

    double at(int i, int j) const { return p[static_cast<std::size_t>(i) * k + j]; }
};

// Product-moment correlation; empty when either vector has zero variance.
// Throws std::invalid_argument on length mismatch or length < 2.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

// Mean pairwise Pearson correlation of preference vectors.
PairwiseStat preference_similarity(const Population& pop);

// Mean pairwise |Pearson| of preference vectors.
PairwiseStat preference_congruence(const Population& pop);

// Mean pairwise Pearson correlation of the off-diagonal association entries,
// flattened row-major.
PairwiseStat association_similarity(const Population& pop);

// (1/K^2) sum |Ra/max(Ra) - Rb/max(Rb)|, the normalized-matrix distance kept
// as a companion diagnostic. Empty when either matrix has max <= 0.
std::optional<double> interpretive_distance(std::span<const double> ra,
                                            std::span<const double> rb, int k);

// Law of the ordered pair an agent exhibits.
//   sequential:          p(i,j) = softmax(V)_i * softmax(V excluding i)_j
//   association_coupled: p(i,j) proportional to softmax(V)_i * max(R_ij, 1e-9) * exp(V_j)
JointExhibitDistribution joint_exhibit_distribution(const AgentState& agent,
                                                    const ModelConfig& cfg);

// I = sum p(i,j) log(p(i,j) / (p(i) q(j))) in nats, marginals taken from the
// joint; zero-probability cells contribute zero.
double mutual_information(const JointExhibitDistribution& joint);

// Mean over agents of the mutual information of their exhibit distribution.
double mean_mutual_information(const Population& pop, const ModelConfig& cfg);

// Gap-statistic estimate of the number of preference clusters under the
// congruence distance d(a,b) = 1 - |pearson(V_a, V_b)| (V and -V cluster
// together), k-medoids partitions, and reference sets drawn by permuting each
// coordinate independently across agents. Returns the smallest k with
// Gap(k) >= Gap(k+1) - s_{k+1}, else k_max. k_max is capped at the number of
// agents.
int optimal_cluster_count(const Population& pop, int k_max, int n_refs, RandomStream& rng);

// All four measures from one snapshot.
MeasurementRecord measure_population(const Population& pop, const ModelConfig& cfg,
                                     std::uint64_t t);

}  // namespace duplexsim
