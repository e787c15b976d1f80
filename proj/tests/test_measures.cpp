#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "duplexsim/measures.hpp"

using namespace duplexsim;

namespace {

AgentState make_agent(std::vector<double> v) {
    AgentState agent;
    agent.k = static_cast<int>(v.size());
    agent.preference = std::move(v);
    agent.association.assign(static_cast<std::size_t>(agent.k) * agent.k, 1.0);
    return agent;
}

Population population_of(std::vector<std::vector<double>> vs) {
    Population pop;
    pop.k = static_cast<int>(vs.front().size());
    for (auto& v : vs) pop.agents.push_back(make_agent(std::move(v)));
    return pop;
}

// independent mean-pairwise-correlation oracle
double brute_force_similarity(const Population& pop) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t a = 0; a < pop.size(); ++a)
        for (std::size_t b = a + 1; b < pop.size(); ++b) {
            const auto rho = pearson(pop.agents[a].preference, pop.agents[b].preference);
            if (rho) {
                sum += *rho;
                ++count;
            }
        }
    return sum / count;
}

double mi_oracle(const JointExhibitDistribution& joint) {
    const int k = joint.k;
    double info = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double p = joint.at(i, j);
            if (p <= 0.0) continue;
            double row = 0.0, col = 0.0;
            for (int l = 0; l < k; ++l) {
                row += joint.at(i, l);
                col += joint.at(l, j);
            }
            info += p * std::log(p / (row * col));
        }
    return info;
}

JointExhibitDistribution random_joint(int k, RandomStream& rng) {
    JointExhibitDistribution joint;
    joint.k = k;
    joint.p.assign(static_cast<std::size_t>(k) * k, 0.0);
    double total = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            const double w = rng.uniform01();
            joint.p[static_cast<std::size_t>(i) * k + j] = w;
            total += w;
        }
    for (double& p : joint.p) p /= total;
    return joint;
}

}  // namespace

TEST_CASE("pearson identities") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(*pearson(x, x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) ==
          doctest::Approx(-1.0).epsilon(1e-14));
    // product-moment form: cov*n = 11, sxx = 5, syy = 26
    CHECK(*pearson(x, std::vector<double>{2, 4, 5, 9}) ==
          doctest::Approx(11.0 / std::sqrt(130.0)).epsilon(1e-14));

    CHECK_FALSE(pearson(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}).has_value());
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{2}),
                    std::invalid_argument);
}

TEST_CASE("pearson properties: affine invariance, symmetry, sign flip") {
    RandomStream rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_below(8));
        std::vector<double> x(n), y(n);
        for (double& v : x) v = rng.uniform(-5, 5);
        for (double& v : y) v = rng.uniform(-5, 5);
        const auto rho = pearson(x, y);
        if (!rho) continue;
        CHECK(*rho >= -1.0 - 1e-12);
        CHECK(*rho <= 1.0 + 1e-12);
        CHECK(*pearson(y, x) == doctest::Approx(*rho).epsilon(1e-12));

        const double scale = 0.5 + rng.uniform01() * 3.0;
        const double shift = rng.uniform(-10, 10);
        std::vector<double> transformed(x);
        for (double& v : transformed) v = scale * v + shift;
        CHECK(*pearson(transformed, y) == doctest::Approx(*rho).epsilon(1e-10));

        std::vector<double> negated(x);
        for (double& v : negated) v = -v;
        CHECK(*pearson(negated, y) == doctest::Approx(-*rho).epsilon(1e-10));
    }
}

TEST_CASE("preference similarity and congruence") {
    const std::vector<double> v{0.5, -1.0, 0.25, 2.0};
    std::vector<double> neg(v);
    for (double& x : neg) x = -x;

    Population identical = population_of({v, v, v});
    CHECK(*preference_similarity(identical).mean == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(*preference_congruence(identical).mean == doctest::Approx(1.0).epsilon(1e-14));

    Population antipodal = population_of({v, neg});
    CHECK(*preference_similarity(antipodal).mean == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(*preference_congruence(antipodal).mean == doctest::Approx(1.0).epsilon(1e-14));

    // the alpha=0 signature: opposite camps are congruent but not similar
    Population camps = population_of({v, v, v, neg, neg, neg});
    CHECK(*preference_congruence(camps).mean == doctest::Approx(1.0).epsilon(1e-12));
    // 6 within-camp pairs at +1, 9 cross pairs at -1
    CHECK(*preference_similarity(camps).mean == doctest::Approx(-0.2).epsilon(1e-12));

    RandomStream rng(10);
    Population random_pop = init_population(4, 5, rng);
    CHECK(*preference_similarity(random_pop).mean ==
          doctest::Approx(brute_force_similarity(random_pop)).epsilon(1e-12));
}

TEST_CASE("congruence dominates similarity in magnitude") {
    RandomStream rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        Population pop = init_population(6, 4, rng);
        const auto sim = preference_similarity(pop);
        const auto cong = preference_congruence(pop);
        CHECK(*cong.mean >= std::abs(*sim.mean) - 1e-9);
        CHECK(*cong.mean <= 1.0 + 1e-12);
        CHECK(*cong.mean >= 0.0);
    }
}

TEST_CASE("congruence is invariant under per-agent sign flips") {
    RandomStream rng(31);
    Population pop = init_population(8, 5, rng);
    const double base = *preference_congruence(pop).mean;
    for (std::size_t a = 0; a < pop.size(); a += 2)
        for (double& v : pop.agents[a].preference) v = -v;
    CHECK(*preference_congruence(pop).mean == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("association similarity") {
    RandomStream rng(8);
    Population pop = init_population(3, 4, rng);

    // fresh population: every R is constant, every pair excluded
    const auto fresh = association_similarity(pop);
    CHECK_FALSE(fresh.mean.has_value());
    CHECK(fresh.excluded_pairs == 3);
    CHECK(fresh.total_pairs == 3);

    // shared non-constant R correlates perfectly; affine shifts keep it so
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double value = i * 4.0 + j;
            pop.agents[0].r(i, j) = value;
            pop.agents[1].r(i, j) = value;
            pop.agents[2].r(i, j) = 2.0 * value + 3.0;
        }
    const auto shared = association_similarity(pop);
    CHECK(*shared.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(shared.excluded_pairs == 0);
}

TEST_CASE("association similarity ignores a common additive constant") {
    RandomStream rng(19);
    Population pop = init_population(4, 5, rng);
    for (auto& agent : pop.agents)
        for (double& r : agent.association) r = rng.uniform(0, 10);
    const double base = *association_similarity(pop).mean;
    for (auto& agent : pop.agents)
        for (double& r : agent.association) r += 7.25;
    CHECK(*association_similarity(pop).mean == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("interpretive distance") {
    RandomStream rng(3);
    std::vector<double> ra(36), rb(36);
    for (double& x : ra) x = rng.uniform(0.1, 9);
    for (double& x : rb) x = rng.uniform(0.1, 9);

    CHECK(*interpretive_distance(ra, ra, 6) == 0.0);

    // brute-force double sum
    const double max_a = *std::max_element(ra.begin(), ra.end());
    const double max_b = *std::max_element(rb.begin(), rb.end());
    double expected = 0.0;
    for (int c = 0; c < 36; ++c) expected += std::abs(ra[c] / max_a - rb[c] / max_b);
    expected /= 36.0;
    CHECK(*interpretive_distance(ra, rb, 6) == doctest::Approx(expected).epsilon(1e-14));

    // invariant to positive rescaling of either side
    std::vector<double> scaled(rb);
    for (double& x : scaled) x *= 12.5;
    CHECK(*interpretive_distance(ra, scaled, 6) ==
          doctest::Approx(*interpretive_distance(ra, rb, 6)).epsilon(1e-12));

    const std::vector<double> nonpositive(36, -1.0);
    CHECK_FALSE(interpretive_distance(ra, nonpositive, 6).has_value());
}

TEST_CASE("sequential joint exhibit distribution") {
    ModelConfig cfg;
    const AgentState flat = make_agent({0, 0, 0, 0});
    const auto joint = joint_exhibit_distribution(flat, cfg);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j)
                CHECK(joint.at(i, j) == 0.0);
            else
                CHECK(joint.at(i, j) == doctest::Approx(1.0 / 12).epsilon(1e-12));
        }

    // law of the sampler: empirical frequencies at K=3 within +-0.005
    const AgentState agent = make_agent({0.8, -0.2, 0.4});
    const auto law = joint_exhibit_distribution(agent, cfg);
    RandomStream rng(123);
    std::vector<double> freq(9, 0.0);
    constexpr int draws = 1000000;
    for (int s = 0; s < draws; ++s) {
        const auto [i, j] = exhibit_pair(agent, rng);
        freq[i * 3 + j] += 1.0 / draws;
    }
    for (int c = 0; c < 9; ++c) CHECK(std::abs(freq[c] - law.p[c]) < 0.005);

    // probabilities sum to one
    double total = 0.0;
    for (const double p : law.p) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coupled joint with constant off-diagonal R has the product form") {
    ModelConfig cfg;
    cfg.mi_mode = MiMode::association_coupled;
    AgentState agent = make_agent({0.9, -0.4, 0.2});
    for (double& r : agent.association) r = 3.5;

    const auto joint = joint_exhibit_distribution(agent, cfg);
    // algebraic reduction: p(i,j) = e^{V_i} e^{V_j} / sum_{a != b} e^{V_a} e^{V_b}
    double z = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b) z += std::exp(agent.preference[a]) * std::exp(agent.preference[b]);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            const double expected =
                std::exp(agent.preference[i]) * std::exp(agent.preference[j]) / z;
            CHECK(joint.at(i, j) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("coupled joint stays finite under saturated preferences") {
    ModelConfig cfg;
    cfg.mi_mode = MiMode::association_coupled;
    AgentState agent = make_agent({3000.0, 1.0, -2000.0});
    const auto joint = joint_exhibit_distribution(agent, cfg);
    double total = 0.0;
    for (const double p : joint.p) {
        CHECK(std::isfinite(p));
        total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mutual information stays finite when the joint holds denormals") {
    // preference gaps near -740 push softmax entries into the denormal range,
    // where marginal products underflow to zero
    ModelConfig cfg;
    for (const auto mode : {MiMode::sequential, MiMode::association_coupled}) {
        cfg.mi_mode = mode;
        const AgentState agent = make_agent({0.0, -740.0, -741.0, -742.0});
        const double info = mutual_information(joint_exhibit_distribution(agent, cfg));
        CHECK(std::isfinite(info));
        CHECK(info >= -1e-12);
    }

    Population pop;
    pop.k = 4;
    pop.agents = {make_agent({0.0, -740.0, -741.0, -742.0}),
                  make_agent({500.0, -300.0, -299.0, -301.0})};
    cfg.mi_mode = MiMode::sequential;
    CHECK(std::isfinite(mean_mutual_information(pop, cfg)));
}

TEST_CASE("mutual information basics") {
    // disjoint-support product joint: first position in {0,1}, second in {2,3}
    JointExhibitDistribution product;
    product.k = 4;
    product.p.assign(16, 0.0);
    const double a[2]{0.3, 0.7}, b[2]{0.6, 0.4};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) product.p[i * 4 + (j + 2)] = a[i] * b[j];
    CHECK(mutual_information(product) == doctest::Approx(0.0).epsilon(1e-12));

    // two symbols, deterministic pairing, uniform marginals
    JointExhibitDistribution coupled;
    coupled.k = 2;
    coupled.p = {0.0, 0.5, 0.5, 0.0};
    CHECK(mutual_information(coupled) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("mutual information matches the exhaustive oracle") {
    RandomStream rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 2 + static_cast<int>(rng.uniform_below(3));
        const auto joint = random_joint(k, rng);
        const double got = mutual_information(joint);
        CHECK(got == doctest::Approx(mi_oracle(joint)).epsilon(1e-12));
        CHECK(got >= -1e-12);
    }
}

TEST_CASE("mean mutual information") {
    ModelConfig cfg;
    const AgentState agent = make_agent({0.5, -0.5, 1.0, 0.0, 0.2, -0.8});
    const double single = mutual_information(joint_exhibit_distribution(agent, cfg));

    Population pop;
    pop.k = 6;
    pop.agents = {agent, agent, agent};
    CHECK(mean_mutual_information(pop, cfg) == doctest::Approx(single).epsilon(1e-14));

    Population lone;
    lone.k = 6;
    lone.agents = {agent};
    CHECK(mean_mutual_information(lone, cfg) == doctest::Approx(single).epsilon(1e-14));

    // V = 0 exactly: sequential coupling gives ln(K/(K-1))
    Population fresh;
    fresh.k = 6;
    fresh.agents = {make_agent({0, 0, 0, 0, 0, 0})};
    CHECK(mean_mutual_information(fresh, cfg) ==
          doctest::Approx(std::log(6.0 / 5.0)).epsilon(1e-12));
}

TEST_CASE("measures do not mutate the population and repeat bitwise") {
    RandomStream rng(555);
    Population pop = init_population(6, 4, rng);
    for (auto& agent : pop.agents)
        for (double& r : agent.association) r = rng.uniform(0, 5);
    const Population snapshot = pop;
    ModelConfig cfg;

    const auto rec1 = measure_population(pop, cfg, 7);
    const auto rec2 = measure_population(pop, cfg, 7);
    CHECK(rec1.pref_similarity == rec2.pref_similarity);
    CHECK(rec1.pref_congruence == rec2.pref_congruence);
    CHECK(rec1.assoc_similarity == rec2.assoc_similarity);
    CHECK(rec1.mean_mutual_info == rec2.mean_mutual_info);
    for (std::size_t a = 0; a < pop.size(); ++a) {
        CHECK(pop.agents[a].preference == snapshot.agents[a].preference);
        CHECK(pop.agents[a].association == snapshot.agents[a].association);
    }
    CHECK(*rec1.pref_congruence >= std::abs(*rec1.pref_similarity) - 1e-9);
    CHECK(rec1.mean_mutual_info >= -1e-12);
}

TEST_CASE("gap statistic degenerate populations") {
    RandomStream rng(66);
    Population identical = population_of({{0.4, -0.2, 0.9, 0.1},
                                          {0.4, -0.2, 0.9, 0.1},
                                          {0.4, -0.2, 0.9, 0.1},
                                          {0.4, -0.2, 0.9, 0.1},
                                          {0.4, -0.2, 0.9, 0.1}});
    for (int trial = 0; trial < 5; ++trial)
        CHECK(optimal_cluster_count(identical, 4, 10, rng) == 1);

    // V and -V camps are congruent: one culture under the congruence distance
    const std::vector<double> v{0.7, -0.3, 0.5, -0.9};
    std::vector<double> neg(v);
    for (double& x : neg) x = -x;
    Population camps = population_of({v, v, v, v, v, neg, neg, neg, neg, neg});
    for (int trial = 0; trial < 5; ++trial)
        CHECK(optimal_cluster_count(camps, 5, 10, rng) == 1);

    // k_max larger than the population is capped, not an error
    Population trio = population_of({{0.1, 0.5, -0.2, 0.9},
                                     {0.8, -0.6, 0.3, -0.1},
                                     {-0.4, 0.2, 0.7, 0.6}});
    const int k = optimal_cluster_count(trio, 10, 5, rng);
    CHECK(k >= 1);
    CHECK(k <= 3);
}

TEST_CASE("gap statistic recovers three planted preference clusters") {
    // fixed patterns with max pairwise |rho| = 0.054: well separated under the
    // congruence distance without the degenerate sign-folding of corner vectors
    const std::vector<std::vector<double>> patterns{
        {-0.639294, 0.485758, -0.862060, 0.537337, -0.702718, 0.833689},
        {0.736409, 0.125731, 0.363770, 0.464694, -0.408017, 0.110280},
        {0.839807, -0.439020, -0.074215, 0.647707, 0.754950, 0.738927}};
    int hits = 0;
    for (int run = 0; run < 20; ++run) {
        RandomStream rng(9000 + run);
        Population pop;
        pop.k = 6;
        for (const auto& pattern : patterns)
            for (int member = 0; member < 10; ++member) {
                std::vector<double> v(pattern);
                for (double& x : v) x += 0.05 * rng.normal();
                pop.agents.push_back(make_agent(std::move(v)));
            }
        if (optimal_cluster_count(pop, 6, 20, rng) == 3) ++hits;
    }
    CHECK(hits >= 18);  // at least 90% of 20 seeded runs
}
