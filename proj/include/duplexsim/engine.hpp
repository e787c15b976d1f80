#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "duplexsim/dynamics.hpp"
#include "duplexsim/measures.hpp"
#include "duplexsim/network.hpp"

namespace duplexsim {

enum class Topology { complete, scale_free, small_world, file };

std::string topology_name(Topology t);
Topology topology_from_name(const std::string& name);

struct TopologyParams {
    std::uint32_t k_out = 6;
    std::uint32_t clusters = 5;
    double p_rewire = 0.1;
    std::string path;               // used when topology == file
};

struct ExperimentSpec {
    Topology topology = Topology::complete;
    TopologyParams topology_params;
    std::uint32_t n = 30;
    ModelConfig model;              // template; alpha and master_seed set per cell
    std::vector<double> alphas{0.0, 0.25, 0.5, 0.75, 1.0};
    std::uint32_t replicates = 10;
    std::uint64_t sample_every = 500;
    std::string out_path;
    bool measure_clusters = false;  // gap statistic per sample; costly, off by default
};

struct ResultRow {
    std::string topology;
    double alpha = 0.0;
    std::uint32_t replicate = 0;
    std::uint64_t t = 0;
    std::optional<double> pref_similarity;
    std::optional<double> pref_congruence;
    std::optional<double> assoc_similarity;
    double mean_mutual_info = 0.0;
    std::uint64_t excluded_pairs = 0;
    std::uint64_t skipped_steps = 0;
    std::optional<int> optimal_clusters;  // present only when measure_clusters
};

// Stable avalanche mix of (master, alpha_index, replicate):
//   mix(mix(mix(master) ^ mix(alpha_index + 0x9E3779B97F4A7C15)) ^ mix(replicate + 0xD1B54A32D192ED03))
// with mix = the SplitMix64 finalizer (see rng.hpp). Frozen: changing it
// changes every published result.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t alpha_index,
                          std::uint64_t replicate);

// Stream tag reserved for structural (topology) seeds. Dynamics streams pass
// the bit pattern of alpha, which for alpha in [0, 1] is either 0 or has
// exponent bits set, so the tag never collides.
inline constexpr std::uint64_t kStructureStream = 0xFFFFFFFFULL;

// The duplex network for one replicate. Random topologies draw a fresh
// structural seed per replicate, shared across alphas.
DuplexNetwork build_network(const ExperimentSpec& spec, std::uint32_t replicate);

// One (alpha, replicate) cell: builds the network, seeds the dynamics with
// derive_seed(master, <bit pattern of alpha>, replicate) — keyed by the alpha
// value so a cell's results do not depend on its grid position — and samples
// every spec.sample_every rounds plus t = 0 and the final round.
std::vector<ResultRow> run_single(const ExperimentSpec& spec, std::size_t alpha_index,
                                  std::uint32_t replicate);

// Replays the same cell and returns its final population (the state behind
// the last ResultRow of run_single).
Population final_population(const ExperimentSpec& spec, std::size_t alpha_index,
                            std::uint32_t replicate);

// Every (alpha, replicate) cell, cells run concurrently on `threads` workers
// (0 = hardware concurrency). Output order is canonical: sorted by alpha,
// replicate, t, regardless of execution order.
std::vector<ResultRow> run_sweep(const ExperimentSpec& spec, unsigned threads = 0);

// Per-(topology, alpha) mean and sample standard deviation of each measure at
// the final sample time. A single replicate reports sd 0 by convention.
struct SummaryRow {
    std::string topology;
    double alpha = 0.0;
    std::uint64_t t = 0;
    std::uint32_t replicates = 0;
    std::optional<double> mean_pref_similarity, sd_pref_similarity;
    std::optional<double> mean_pref_congruence, sd_pref_congruence;
    std::optional<double> mean_assoc_similarity, sd_assoc_similarity;
    double mean_mutual_info = 0.0, sd_mutual_info = 0.0;
};

// Throws when a (topology, alpha, replicate) cell present in the table lacks
// a final-time row.
std::vector<SummaryRow> final_comparison(const std::vector<ResultRow>& table);

// JSON config mirroring ExperimentSpec field names. Unknown keys are errors.
ExperimentSpec load_experiment_spec(const std::string& path);

// CSV schema:
//   topology,alpha,replicate,t,pref_similarity,pref_congruence,
//   assoc_similarity,mean_mutual_info,excluded_pairs,skipped_steps
// plus a trailing optimal_clusters column when cluster measurement was on.
// Floats use 9 significant digits; undefined values are empty fields.
void write_result_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::string result_csv_string(const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_result_csv(const std::string& path);

// Deterministic SVG line chart of one measure against t, one
// replicate-averaged curve per (topology, alpha). topology_filter narrows the
// table first; an unknown measure or an empty selection throws and writes
// nothing.
void emit_plot(const std::vector<ResultRow>& table, const std::string& measure,
               const std::string& out_path, const std::string& topology_filter = "");
std::string render_plot_svg(const std::vector<ResultRow>& table, const std::string& measure,
                            const std::string& topology_filter = "");

// Population snapshot as JSON ({"k":..., "agents":[{"preference":[...],
// "association":[[...], ...]}, ...]}).
void save_population(const Population& pop, const std::string& path);
Population load_population(const std::string& path);

// "%.9g" formatting used by every emitter.
std::string format_double(double v);

}  // namespace duplexsim
