#include "duplexsim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace duplexsim {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 elements");
    const double n = static_cast<double>(x.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

namespace {

struct PairAccumulator {
    double sum = 0.0;
    double sum_abs = 0.0;
    std::uint64_t included = 0;
    std::uint64_t excluded = 0;
    std::uint64_t total = 0;

    void add(std::optional<double> rho) {
        ++total;
        if (!rho) {
            ++excluded;
            return;
        }
        sum += *rho;
        sum_abs += std::abs(*rho);
        ++included;
    }
};

PairAccumulator preference_pairs(const Population& pop) {
    if (pop.size() < 2)
        throw std::invalid_argument("preference measures: need at least 2 agents");
    PairAccumulator acc;
    for (std::size_t a = 0; a < pop.size(); ++a)
        for (std::size_t b = a + 1; b < pop.size(); ++b)
            acc.add(pearson(pop.agents[a].preference, pop.agents[b].preference));
    return acc;
}

std::vector<double> off_diagonal(const AgentState& agent) {
    const int k = agent.k;
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(k) * k - k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j) flat.push_back(agent.r(i, j));
    return flat;
}

}  // namespace

PairwiseStat preference_similarity(const Population& pop) {
    const auto acc = preference_pairs(pop);
    PairwiseStat stat{std::nullopt, acc.excluded, acc.total};
    if (acc.included > 0) stat.mean = acc.sum / static_cast<double>(acc.included);
    return stat;
}

PairwiseStat preference_congruence(const Population& pop) {
    const auto acc = preference_pairs(pop);
    PairwiseStat stat{std::nullopt, acc.excluded, acc.total};
    if (acc.included > 0) stat.mean = acc.sum_abs / static_cast<double>(acc.included);
    return stat;
}

PairwiseStat association_similarity(const Population& pop) {
    if (pop.size() < 2)
        throw std::invalid_argument("association_similarity: need at least 2 agents");
    std::vector<std::vector<double>> flats(pop.size());
    for (std::size_t a = 0; a < pop.size(); ++a) flats[a] = off_diagonal(pop.agents[a]);
    PairAccumulator acc;
    for (std::size_t a = 0; a < pop.size(); ++a)
        for (std::size_t b = a + 1; b < pop.size(); ++b)
            acc.add(pearson(flats[a], flats[b]));
    PairwiseStat stat{std::nullopt, acc.excluded, acc.total};
    if (acc.included > 0) stat.mean = acc.sum / static_cast<double>(acc.included);
    return stat;
}

std::optional<double> interpretive_distance(std::span<const double> ra,
                                            std::span<const double> rb, int k) {
    const std::size_t cells = static_cast<std::size_t>(k) * k;
    if (ra.size() != cells || rb.size() != cells)
        throw std::invalid_argument("interpretive_distance: matrices are not KxK");
    const double max_a = *std::max_element(ra.begin(), ra.end());
    const double max_b = *std::max_element(rb.begin(), rb.end());
    if (max_a <= 0.0 || max_b <= 0.0) return std::nullopt;
    double total = 0.0;
    for (std::size_t c = 0; c < cells; ++c)
        total += std::abs(ra[c] / max_a - rb[c] / max_b);
    return total / static_cast<double>(cells);
}

JointExhibitDistribution joint_exhibit_distribution(const AgentState& agent,
                                                    const ModelConfig& cfg) {
    const int k = agent.k;
    if (k < 2) throw std::invalid_argument("joint_exhibit_distribution: K must be >= 2");
    JointExhibitDistribution joint;
    joint.k = k;
    joint.p.assign(static_cast<std::size_t>(k) * k, 0.0);

    if (cfg.mi_mode == MiMode::sequential) {
        const auto first = softmax_probabilities(agent.preference);
        std::vector<double> remaining(static_cast<std::size_t>(k) - 1);
        for (int i = 0; i < k; ++i) {
            for (int idx = 0, out = 0; idx < k; ++idx)
                if (idx != i) remaining[out++] = agent.preference[idx];
            const auto second = softmax_probabilities(remaining);
            for (int idx = 0, out = 0; idx < k; ++idx) {
                if (idx == i) continue;
                joint.p[static_cast<std::size_t>(i) * k + idx] = first[i] * second[out++];
            }
        }
        return joint;
    }

    // association-coupled: p(i,j) proportional to softmax(V)_i * max(R_ij, eps) * exp(V_j),
    // assembled in log space so saturated preference vectors cannot underflow
    // the normalizer
    constexpr double eps = 1e-9;
    const double peak = *std::max_element(agent.preference.begin(), agent.preference.end());
    double z = 0.0;
    for (int i = 0; i < k; ++i) z += std::exp(agent.preference[i] - peak);
    const double log_z = std::log(z);

    std::vector<double> logs(static_cast<std::size_t>(k) * k,
                             -std::numeric_limits<double>::infinity());
    double log_peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        const double log_softmax_i = agent.preference[i] - peak - log_z;
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            const double l = log_softmax_i + std::log(std::max(agent.r(i, j), eps)) +
                             (agent.preference[j] - peak);
            logs[static_cast<std::size_t>(i) * k + j] = l;
            log_peak = std::max(log_peak, l);
        }
    }
    double total = 0.0;
    for (std::size_t c = 0; c < logs.size(); ++c) {
        if (std::isinf(logs[c])) continue;
        joint.p[c] = std::exp(logs[c] - log_peak);
        total += joint.p[c];
    }
    for (double& p : joint.p) p /= total;
    return joint;
}

double mutual_information(const JointExhibitDistribution& joint) {
    const int k = joint.k;
    std::vector<double> row(k, 0.0), col(k, 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double p = joint.at(i, j);
            row[i] += p;
            col[j] += p;
        }
    double info = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double p = joint.at(i, j);
            if (p <= 0.0) continue;
            // log difference, not log of the quotient: denormal cells make
            // row*col underflow to zero and the quotient blow up to inf
            info += p * (std::log(p) - std::log(row[i]) - std::log(col[j]));
        }
    return info;
}

double mean_mutual_information(const Population& pop, const ModelConfig& cfg) {
    if (pop.size() == 0)
        throw std::invalid_argument("mean_mutual_information: empty population");
    double total = 0.0;
    for (const auto& agent : pop.agents)
        total += mutual_information(joint_exhibit_distribution(agent, cfg));
    return total / static_cast<double>(pop.size());
}

// ---------------------------------------------------------------------------
// gap statistic: k-medoids under the congruence distance, coordinate-permuted
// references
// ---------------------------------------------------------------------------
namespace {

using DistanceMatrix = std::vector<double>;  // n x n row-major

DistanceMatrix congruence_distances(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    DistanceMatrix d(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            double dist;
            if (rows[a] == rows[b]) {
                dist = 0.0;
            } else {
                const auto rho = pearson(rows[a], rows[b]);
                dist = rho ? 1.0 - std::abs(*rho) : 1.0;
            }
            d[a * n + b] = d[b * n + a] = dist;
        }
    }
    return d;
}

double assignment_cost(const DistanceMatrix& d, std::size_t n,
                       const std::vector<std::size_t>& medoids) {
    double cost = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (const std::size_t m : medoids) best = std::min(best, d[p * n + m]);
        cost += best;
    }
    return cost;
}

// classic BUILD + SWAP partitioning around medoids; deterministic (ties keep
// the lowest index)
std::vector<std::size_t> k_medoids(const DistanceMatrix& d, std::size_t n, std::size_t k) {
    std::vector<std::size_t> medoids;
    std::vector<char> is_medoid(n, 0);

    for (std::size_t round = 0; round < k; ++round) {
        std::size_t best_candidate = n;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < n; ++c) {
            if (is_medoid[c]) continue;
            medoids.push_back(c);
            const double cost = assignment_cost(d, n, medoids);
            medoids.pop_back();
            if (cost < best_cost) {
                best_cost = cost;
                best_candidate = c;
            }
        }
        medoids.push_back(best_candidate);
        is_medoid[best_candidate] = 1;
    }

    double current_cost = assignment_cost(d, n, medoids);
    for (;;) {
        double best_cost = current_cost;
        std::size_t best_slot = n, best_candidate = n;
        for (std::size_t slot = 0; slot < medoids.size(); ++slot) {
            const std::size_t original = medoids[slot];
            for (std::size_t c = 0; c < n; ++c) {
                if (is_medoid[c]) continue;
                medoids[slot] = c;
                const double cost = assignment_cost(d, n, medoids);
                if (cost < best_cost) {
                    best_cost = cost;
                    best_slot = slot;
                    best_candidate = c;
                }
            }
            medoids[slot] = original;
        }
        if (best_slot == n) break;
        is_medoid[medoids[best_slot]] = 0;
        is_medoid[best_candidate] = 1;
        medoids[best_slot] = best_candidate;
        current_cost = best_cost;
    }
    return medoids;
}

// Tibshirani's pooled within-cluster dispersion: sum over clusters of
// (sum of pairwise distances in the cluster) / (2 * cluster size)
double within_dispersion(const DistanceMatrix& d, std::size_t n,
                         const std::vector<std::size_t>& medoids) {
    std::vector<std::size_t> assign(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < medoids.size(); ++m) {
            const double dist = d[p * n + medoids[m]];
            if (dist < best) {
                best = dist;
                assign[p] = m;
            }
        }
    }
    double total = 0.0;
    for (std::size_t m = 0; m < medoids.size(); ++m) {
        double pair_sum = 0.0;
        std::size_t count = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (assign[a] != m) continue;
            ++count;
            for (std::size_t b = 0; b < n; ++b)
                if (assign[b] == m) pair_sum += d[a * n + b];
        }
        if (count > 0) total += pair_sum / (2.0 * static_cast<double>(count));
    }
    return total;
}

double safe_log(double w) { return std::log(std::max(w, 1e-300)); }

}  // namespace

int optimal_cluster_count(const Population& pop, int k_max, int n_refs, RandomStream& rng) {
    const std::size_t n = pop.size();
    if (n < 1) throw std::invalid_argument("optimal_cluster_count: empty population");
    if (k_max < 1) throw std::invalid_argument("optimal_cluster_count: k_max must be >= 1");
    if (n_refs < 1) throw std::invalid_argument("optimal_cluster_count: n_refs must be >= 1");
    k_max = std::min<int>(k_max, static_cast<int>(n));

    std::vector<std::vector<double>> data(n);
    for (std::size_t a = 0; a < n; ++a) data[a] = pop.agents[a].preference;
    const int dim = pop.k;

    const DistanceMatrix d_data = congruence_distances(data);
    std::vector<double> log_w_data(k_max + 1, 0.0);
    for (int k = 1; k <= k_max; ++k) {
        const double w = within_dispersion(d_data, n, k_medoids(d_data, n, k));
        if (k == 1 && w == 0.0) return 1;  // zero dispersion: one cluster
        log_w_data[k] = safe_log(w);
    }

    // references: permute each coordinate independently across agents
    std::vector<std::vector<double>> log_w_ref(k_max + 1, std::vector<double>(n_refs, 0.0));
    std::vector<std::vector<double>> ref(n, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> perm(n);
    for (int b = 0; b < n_refs; ++b) {
        for (int coord = 0; coord < dim; ++coord) {
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            for (std::size_t idx = n; idx > 1; --idx)
                std::swap(perm[idx - 1], perm[rng.uniform_below(idx)]);
            for (std::size_t a = 0; a < n; ++a) ref[a][coord] = data[perm[a]][coord];
        }
        const DistanceMatrix d_ref = congruence_distances(ref);
        for (int k = 1; k <= k_max; ++k)
            log_w_ref[k][b] = safe_log(within_dispersion(d_ref, n, k_medoids(d_ref, n, k)));
    }

    std::vector<double> gap(k_max + 1, 0.0), s(k_max + 1, 0.0);
    for (int k = 1; k <= k_max; ++k) {
        double mean_log = 0.0;
        for (int b = 0; b < n_refs; ++b) mean_log += log_w_ref[k][b];
        mean_log /= n_refs;
        double variance = 0.0;
        for (int b = 0; b < n_refs; ++b) {
            const double dev = log_w_ref[k][b] - mean_log;
            variance += dev * dev;
        }
        variance /= n_refs;
        gap[k] = mean_log - log_w_data[k];
        s[k] = std::sqrt(variance) * std::sqrt(1.0 + 1.0 / n_refs);
    }
    for (int k = 1; k < k_max; ++k)
        if (gap[k] >= gap[k + 1] - s[k + 1]) return k;
    return k_max;
}

MeasurementRecord measure_population(const Population& pop, const ModelConfig& cfg,
                                     std::uint64_t t) {
    MeasurementRecord rec;
    rec.t = t;
    const auto pref = preference_pairs(pop);
    if (pref.included > 0) {
        rec.pref_similarity = pref.sum / static_cast<double>(pref.included);
        rec.pref_congruence = pref.sum_abs / static_cast<double>(pref.included);
    }
    const auto assoc = association_similarity(pop);
    rec.assoc_similarity = assoc.mean;
    rec.mean_mutual_info = mean_mutual_information(pop, cfg);
    rec.excluded_pairs = pref.excluded + assoc.excluded_pairs;
    return rec;
}

}  // namespace duplexsim
