// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Stochastic criteria run the headline setting (n=30, K=6,
// t=100,000) with fixed master seeds, so every number below is reproducible.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "duplexsim/engine.hpp"

using namespace duplexsim;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) { return format_double(v); }

ExperimentSpec reference_spec(Topology topology, std::vector<double> alphas,
                          std::uint32_t replicates, std::uint64_t master_seed) {
    ExperimentSpec spec;
    spec.topology = topology;
    spec.n = 30;
    spec.model.k = 6;
    spec.model.steps = 100000;
    spec.model.master_seed = master_seed;
    spec.alphas = std::move(alphas);
    spec.replicates = replicates;
    spec.sample_every = 500;
    if (topology == Topology::scale_free) spec.topology_params.k_out = 6;
    if (topology == Topology::small_world) {
        spec.topology_params.k_out = 5;
        spec.topology_params.clusters = 5;
        spec.topology_params.p_rewire = 0.1;
    }
    return spec;
}

// replicate means per (alpha, t), plus each cell's final value
struct Curve {
    std::map<std::uint64_t, double> mean_similarity;
    std::map<std::uint64_t, double> mean_congruence;
    double final_similarity = 0.0;
    double final_congruence = 0.0;
};

std::map<double, Curve> curves_by_alpha(const std::vector<ResultRow>& rows) {
    std::map<double, std::map<std::uint64_t, std::pair<double, int>>> sim, cong;
    std::uint64_t t_final = 0;
    for (const auto& row : rows) t_final = std::max(t_final, row.t);
    for (const auto& row : rows) {
        if (!row.pref_similarity || !row.pref_congruence) continue;
        auto& s = sim[row.alpha][row.t];
        s.first += *row.pref_similarity;
        s.second += 1;
        auto& c = cong[row.alpha][row.t];
        c.first += *row.pref_congruence;
        c.second += 1;
    }
    std::map<double, Curve> out;
    for (const auto& [alpha, by_t] : sim) {
        Curve& curve = out[alpha];
        for (const auto& [t, sc] : by_t) curve.mean_similarity[t] = sc.first / sc.second;
        for (const auto& [t, sc] : cong[alpha]) curve.mean_congruence[t] = sc.first / sc.second;
        curve.final_similarity = curve.mean_similarity.at(t_final);
        curve.final_congruence = curve.mean_congruence.at(t_final);
    }
    return out;
}

void criterion_1() {
    const bool pass = generate_complete(30).edge_count() == 870 &&
                      generate_scale_free(30, 6, 1).edge_count() == 180 &&
                      generate_small_world(30, 5, 5, 0.1, 1).edge_count() == 150 &&
                      duplicate(generate_complete(30)).layer2.edge_count() == 870;
    report(1, pass, "generator edge counts are exact (870 / 180 / 150)", "zero tolerance");
}

void criterion_2_3_4() {
    const auto spec =
        reference_spec(Topology::complete, {0.0, 0.25, 0.5, 0.75, 1.0}, 30, 20250801);
    const auto rows = run_sweep(spec);
    const auto curves = curves_by_alpha(rows);

    {
        const Curve& c = curves.at(0.0);
        const bool pass = c.final_similarity >= -0.3 && c.final_similarity <= 0.3 &&
                          c.final_congruence >= 0.7;
        report(2, pass, "alpha=0 signature: near-zero similarity, high congruence",
               "mean final similarity " + fmt(c.final_similarity) + " in [-0.3, 0.3], congruence " +
                   fmt(c.final_congruence) + " >= 0.7, 30 replicates");
    }
    {
        const Curve& c = curves.at(1.0);
        const bool pass = c.final_similarity >= 0.95 && c.final_congruence >= 0.95;
        report(3, pass, "alpha=1 consensus: similarity and congruence near one",
               "mean final similarity " + fmt(c.final_similarity) + ", congruence " +
                   fmt(c.final_congruence) + ", both >= 0.95, 30 replicates");
    }
    {
        double worst = 1.0;
        for (const double alpha : {0.25, 0.5, 0.75}) {
            const Curve& c = curves.at(alpha);
            for (const auto& [t, v] : c.mean_similarity)
                if (t >= 20000) worst = std::min(worst, v);
            for (const auto& [t, v] : c.mean_congruence)
                if (t >= 20000) worst = std::min(worst, v);
        }
        report(4, worst >= 0.85, "mixed-alpha curves stabilize high after t=20,000",
               "worst replicate-mean value at any sample point t >= 20k: " + fmt(worst) +
                   " >= 0.85");
    }
}

void criterion_5_6() {
    const auto sw_spec =
        reference_spec(Topology::small_world, {0.5, 0.75, 1.0}, 24, 77107710);
    const auto sw_rows = run_sweep(sw_spec);
    const auto sw = curves_by_alpha(sw_rows);

    const auto complete_spec = reference_spec(Topology::complete, {1.0}, 24, 31415926);
    const auto complete_rows = run_sweep(complete_spec);
    const auto complete = curves_by_alpha(complete_rows);

    {
        const double sw_final = sw.at(1.0).final_similarity;
        const double complete_final = complete.at(1.0).final_similarity;
        report(5, sw_final < complete_final,
               "small-world impedes contagion at alpha=1",
               "final mean similarity small-world " + fmt(sw_final) + " < complete " +
                   fmt(complete_final) + ", 24 replicates each");
    }
    {
        const auto& s05 = sw.at(0.5).mean_similarity;
        const auto& s075 = sw.at(0.75).mean_similarity;
        const auto& s1 = sw.at(1.0).mean_similarity;
        std::uint64_t t_star = 0;
        bool found = false;
        for (const auto& [t, v1] : s1) {
            if (t == 0) continue;  // initialization noise does not count
            if (s05.count(t) && s075.count(t) && s05.at(t) > v1 && s075.at(t) > v1) {
                found = true;
                t_star = t;
                break;
            }
        }
        report(6, found, "alpha=0.5 and 0.75 overtake alpha=1 on small-world",
               found ? "first overtaking at t=" + std::to_string(t_star)
                     : "no sample time with both curves above alpha=1");
    }
}

void criterion_7() {
    RandomStream rng(4242);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 2 + static_cast<int>(rng.uniform_below(7));
        std::vector<double> v(k), r(static_cast<std::size_t>(k) * k);
        for (double& x : v) x = rng.uniform(-5, 5);
        for (double& x : r) x = rng.uniform(-2, 60);
        ModelConfig cfg;
        cfg.cs_normalize = rng.uniform01() < 0.5;
        cfg.cs_include_diagonal = rng.uniform01() < 0.5;

        double scale = 1.0;
        if (cfg.cs_normalize) {
            const double peak = *std::max_element(r.begin(), r.end());
            if (peak > 0.0) scale = 1.0 / peak;
        }
        double total = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (i == j && !cfg.cs_include_diagonal) continue;
                total += std::abs(r[i * k + j] * scale - std::abs(v[i] - v[j]));
            }
        const double oracle = 2.0 / (static_cast<double>(k) * (k - 1)) * total;
        worst = std::max(worst, std::abs(constraint_satisfaction(v, r, cfg) - oracle));
    }
    report(7, worst <= 1e-12, "constraint satisfaction matches the brute-force double sum",
           "worst deviation " + fmt(worst) + " over 1000 random (V, R), K in 2..8");
}

void criterion_8() {
    RandomStream rng(8888);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 2 + static_cast<int>(rng.uniform_below(3));
        JointExhibitDistribution joint;
        joint.k = k;
        joint.p.assign(static_cast<std::size_t>(k) * k, 0.0);
        double mass = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (i == j) continue;
                joint.p[static_cast<std::size_t>(i) * k + j] = rng.uniform01();
                mass += joint.p[static_cast<std::size_t>(i) * k + j];
            }
        for (double& p : joint.p) p /= mass;

        double oracle = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                const double p = joint.at(i, j);
                if (p <= 0.0) continue;
                double row = 0.0, col = 0.0;
                for (int l = 0; l < k; ++l) {
                    row += joint.at(i, l);
                    col += joint.at(l, j);
                }
                oracle += p * std::log(p / (row * col));
            }
        worst = std::max(worst, std::abs(mutual_information(joint) - oracle));
    }

    // sequential joint against the sampler it claims to describe
    AgentState agent;
    agent.k = 3;
    agent.preference = {0.7, -0.1, 0.3};
    agent.association.assign(9, 1.0);
    ModelConfig cfg;
    cfg.k = 3;
    const auto law = joint_exhibit_distribution(agent, cfg);
    std::vector<double> freq(9, 0.0);
    constexpr int draws = 1000000;
    RandomStream sampler(1212);
    for (int s = 0; s < draws; ++s) {
        const auto [i, j] = exhibit_pair(agent, sampler);
        freq[i * 3 + j] += 1.0 / draws;
    }
    double worst_freq = 0.0;
    for (int c = 0; c < 9; ++c) worst_freq = std::max(worst_freq, std::abs(freq[c] - law.p[c]));

    report(8, worst <= 1e-12 && worst_freq <= 0.005,
           "mutual information matches enumeration; sequential law matches the sampler",
           "worst MI deviation " + fmt(worst) + ", worst frequency gap " + fmt(worst_freq) +
               " at 1e6 samples");
}

void criterion_9() {
    bool pass = true;
    std::string detail = "all held";

    // pearson identities
    {
        const std::vector<double> x{0.3, 1.8, -2.0, 0.4};
        std::vector<double> affine(x);
        for (double& v : affine) v = 3.0 * v + 1.0;
        std::vector<double> negated(x);
        for (double& v : negated) v = -v;
        const std::vector<double> y{1.0, -0.5, 0.25, 2.0};
        if (std::abs(*pearson(x, x) - 1.0) > 1e-12 ||
            std::abs(*pearson(affine, y) - *pearson(x, y)) > 1e-12 ||
            std::abs(*pearson(negated, y) + *pearson(x, y)) > 1e-12) {
            pass = false;
            detail = "pearson identity failed";
        }
    }

    // congruence >= |similarity|, MI nonnegativity over random populations
    RandomStream rng(9099);
    ModelConfig cfg;
    cfg.k = 6;
    for (int trial = 0; trial < 25 && pass; ++trial) {
        Population pop = init_population(10, 6, rng);
        for (auto& agent : pop.agents)
            for (double& v : agent.preference) v = rng.uniform(-2, 2);
        const auto sim = preference_similarity(pop);
        const auto cong = preference_congruence(pop);
        if (*cong.mean < std::abs(*sim.mean) - 1e-9) {
            pass = false;
            detail = "congruence < |similarity|";
        }
        if (mean_mutual_information(pop, cfg) < -1e-12) {
            pass = false;
            detail = "negative mutual information";
        }
    }

    // independence-zero: disjoint-support product joint
    {
        JointExhibitDistribution product;
        product.k = 4;
        product.p.assign(16, 0.0);
        product.p[0 * 4 + 2] = 0.18;
        product.p[0 * 4 + 3] = 0.12;
        product.p[1 * 4 + 2] = 0.42;
        product.p[1 * 4 + 3] = 0.28;
        if (std::abs(mutual_information(product)) > 1e-12) {
            pass = false;
            detail = "product joint has nonzero MI";
        }
    }

    // retention monotonicity, exact reverts, at-most-one-agent mutation
    {
        const DuplexNetwork net = duplicate(generate_complete(8));
        ModelConfig dyn;
        dyn.k = 6;
        dyn.alpha = 0.5;
        RandomStream stream(27);
        Population pop = init_population(8, 6, stream);
        for (int s = 0; s < 4000 && pass; ++s) {
            const Population before = pop;
            const StepOutcome outcome = step(pop, net, dyn, stream);
            const AgentState& pre = before.agents[outcome.observer];
            const AgentState& post = pop.agents[outcome.observer];
            if (outcome.kind == StepKind::association) {
                const double now = constraint_satisfaction(post, dyn);
                const double base =
                    constraint_satisfaction(pre.preference, post.association, dyn);
                if (outcome.proposal_retained && !(now > base)) {
                    pass = false;
                    detail = "association retention not monotone";
                }
                if (!outcome.proposal_retained && post.preference != pre.preference) {
                    pass = false;
                    detail = "rejected association proposal left residue";
                }
            } else if (outcome.kind == StepKind::preference) {
                const double now = constraint_satisfaction(post, dyn);
                const double base =
                    constraint_satisfaction(post.preference, pre.association, dyn);
                if (outcome.proposal_retained && !(now > base)) {
                    pass = false;
                    detail = "preference retention not monotone";
                }
                if (!outcome.proposal_retained && post.association != pre.association) {
                    pass = false;
                    detail = "rejected preference proposal left residue";
                }
            }
            for (std::size_t a = 0; a < pop.size() && pass; ++a) {
                if (a == outcome.observer) continue;
                if (pop.agents[a].preference != before.agents[a].preference ||
                    pop.agents[a].association != before.agents[a].association) {
                    pass = false;
                    detail = "a step mutated a non-observer";
                }
            }
        }
    }

    // bitwise determinism of a full run
    {
        ExperimentSpec spec = reference_spec(Topology::complete, {0.5}, 1, 5150);
        spec.model.steps = 20000;
        const auto a = run_single(spec, 0, 0);
        const auto b = run_single(spec, 0, 0);
        if (result_csv_string(a) != result_csv_string(b)) {
            pass = false;
            detail = "rerun produced different bytes";
        }
    }

    report(9, pass, "property suite: measures, retention, reverts, determinism", detail);
}

void criterion_10() {
    // max pairwise |rho| = 0.054 between patterns: well separated under the
    // congruence distance
    const std::vector<std::vector<double>> patterns{
        {-0.639294, 0.485758, -0.862060, 0.537337, -0.702718, 0.833689},
        {0.736409, 0.125731, 0.363770, 0.464694, -0.408017, 0.110280},
        {0.839807, -0.439020, -0.074215, 0.647707, 0.754950, 0.738927}};
    int hits = 0;
    for (int run = 0; run < 20; ++run) {
        RandomStream rng(64000 + run);
        Population pop;
        pop.k = 6;
        for (const auto& pattern : patterns)
            for (int member = 0; member < 10; ++member) {
                AgentState agent;
                agent.k = 6;
                agent.preference = pattern;
                for (double& v : agent.preference) v += 0.05 * rng.normal();
                agent.association.assign(36, 1.0);
                pop.agents.push_back(std::move(agent));
            }
        if (optimal_cluster_count(pop, 6, 20, rng) == 3) ++hits;
    }

    bool identical_ok = true;
    RandomStream rng(31337);
    Population uniform;
    uniform.k = 6;
    for (int a = 0; a < 12; ++a) {
        AgentState agent;
        agent.k = 6;
        agent.preference = {0.4, -0.1, 0.8, -0.6, 0.2, 0.0};
        agent.association.assign(36, 1.0);
        uniform.agents.push_back(std::move(agent));
    }
    for (int trial = 0; trial < 10; ++trial)
        if (optimal_cluster_count(uniform, 6, 15, rng) != 1) identical_ok = false;

    report(10, hits >= 18 && identical_ok,
           "gap statistic recovers 3 planted clusters and 1 for identical agents",
           std::to_string(hits) + "/20 planted runs found k=3 (>= 18 needed); identical -> 1 " +
               (identical_ok ? "always" : "FAILED"));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2_3_4();
    criterion_5_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures == 0) {
        std::printf("acceptance: all 10 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    return 1;
}
