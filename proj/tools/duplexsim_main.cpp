// Command-line front end: generate networks, run and sweep experiments,
// recompute measures from snapshots, and render result plots.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "duplexsim/engine.hpp"

namespace {

using namespace duplexsim;

std::vector<double> parse_alpha_list(const std::string& text) {
    std::vector<double> alphas;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad alpha '" + item + "'");
        alphas.push_back(v);
    }
    if (alphas.empty()) throw std::invalid_argument("alpha list is empty");
    return alphas;
}

int cmd_generate(const std::string& topology, std::uint32_t n, std::uint32_t k_out,
                 std::uint32_t clusters, double p_rewire, std::uint64_t seed,
                 const std::string& out) {
    DirectedLayer layer;
    const Topology topo = topology_from_name(topology);
    switch (topo) {
        case Topology::complete:
            layer = generate_complete(n);
            break;
        case Topology::scale_free:
            layer = generate_scale_free(n, k_out, seed);
            break;
        case Topology::small_world:
            layer = generate_small_world(n, clusters, k_out, p_rewire, seed);
            break;
        case Topology::file:
            throw std::invalid_argument("generate: topology must be a generator name");
    }
    save_duplex(duplicate(layer), out);
    std::cout << "wrote " << out << " (" << layer.edge_count() << " edges per layer)\n";
    return 0;
}

int cmd_run(const std::string& config, const std::string& out,
            const std::string& save_pop) {
    ExperimentSpec spec = load_experiment_spec(config);
    if (!out.empty()) spec.out_path = out;
    if (spec.out_path.empty()) throw std::invalid_argument("run: no output path");

    const auto rows = run_single(spec, 0, 0);
    write_result_csv(rows, spec.out_path);
    std::cout << "wrote " << spec.out_path << " (" << rows.size() << " rows, alpha="
              << format_double(spec.alphas[0]) << ", replicate 0)\n";

    if (!save_pop.empty()) {
        save_population(final_population(spec, 0, 0), save_pop);
        std::cout << "wrote " << save_pop << "\n";
    }
    return 0;
}

int cmd_sweep(const std::string& config, const std::string& alphas_text,
              std::uint32_t replicates, const std::string& out, unsigned threads,
              bool measure_clusters) {
    ExperimentSpec spec = load_experiment_spec(config);
    spec.alphas = parse_alpha_list(alphas_text);
    for (const double a : spec.alphas)
        if (a < 0.0 || a > 1.0) throw std::invalid_argument("alpha outside [0, 1]");
    spec.replicates = replicates;
    if (!out.empty()) spec.out_path = out;
    if (spec.out_path.empty()) throw std::invalid_argument("sweep: no output path");
    if (measure_clusters) spec.measure_clusters = true;

    const auto rows = run_sweep(spec, threads);
    write_result_csv(rows, spec.out_path);
    std::cout << "wrote " << spec.out_path << " (" << rows.size() << " rows, "
              << spec.alphas.size() << " alphas x " << spec.replicates << " replicates)\n";
    return 0;
}

int cmd_plot(const std::string& in, const std::string& measure, const std::string& out,
             const std::string& topology) {
    const auto rows = read_result_csv(in);
    emit_plot(rows, measure, out, topology);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_measure(const std::string& population_path, const std::string& mi_mode,
                bool clusters, int k_max, int n_refs, std::uint64_t seed) {
    const Population pop = load_population(population_path);
    ModelConfig cfg;
    cfg.k = pop.k;
    if (mi_mode == "sequential")
        cfg.mi_mode = MiMode::sequential;
    else if (mi_mode == "association_coupled")
        cfg.mi_mode = MiMode::association_coupled;
    else
        throw std::invalid_argument("mi-mode must be 'sequential' or 'association_coupled'");

    const MeasurementRecord rec = measure_population(pop, cfg, 0);
    const auto print = [](const char* name, const std::optional<double>& v) {
        std::cout << name << "," << (v ? format_double(*v) : std::string{}) << "\n";
    };
    print("pref_similarity", rec.pref_similarity);
    print("pref_congruence", rec.pref_congruence);
    print("assoc_similarity", rec.assoc_similarity);
    std::cout << "mean_mutual_info," << format_double(rec.mean_mutual_info) << "\n";
    std::cout << "excluded_pairs," << rec.excluded_pairs << "\n";

    // companion diagnostic: mean pairwise normalized-matrix distance
    double dist_sum = 0.0;
    std::uint64_t dist_count = 0;
    for (std::size_t a = 0; a < pop.size(); ++a)
        for (std::size_t b = a + 1; b < pop.size(); ++b) {
            const auto d = interpretive_distance(pop.agents[a].association,
                                                 pop.agents[b].association, pop.k);
            if (d) {
                dist_sum += *d;
                ++dist_count;
            }
        }
    std::cout << "interpretive_distance,"
              << (dist_count ? format_double(dist_sum / dist_count) : std::string{}) << "\n";

    if (clusters) {
        RandomStream rng(seed);
        std::cout << "optimal_clusters," << optimal_cluster_count(pop, k_max, n_refs, rng)
                  << "\n";
    }
    return 0;
}

int cmd_summary(const std::string& in) {
    const auto rows = read_result_csv(in);
    const auto summaries = final_comparison(rows);
    const auto field = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string{};
    };
    std::cout << "topology,alpha,t,replicates,mean_pref_similarity,sd_pref_similarity,"
                 "mean_pref_congruence,sd_pref_congruence,mean_assoc_similarity,"
                 "sd_assoc_similarity,mean_mutual_info,sd_mutual_info\n";
    for (const auto& s : summaries) {
        std::cout << s.topology << ',' << format_double(s.alpha) << ',' << s.t << ','
                  << s.replicates << ',' << field(s.mean_pref_similarity) << ','
                  << field(s.sd_pref_similarity) << ',' << field(s.mean_pref_congruence) << ','
                  << field(s.sd_pref_congruence) << ',' << field(s.mean_assoc_similarity) << ','
                  << field(s.sd_assoc_similarity) << ',' << format_double(s.mean_mutual_info)
                  << ',' << format_double(s.sd_mutual_info) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"duplexsim: cultural transmission on two-layer directed networks"};
    app.require_subcommand(1);

    // generate
    std::string g_topology, g_out;
    std::uint32_t g_n = 0, g_k_out = 6, g_clusters = 5;
    double g_p_rewire = 0.1;
    std::uint64_t g_seed = 0;
    auto* generate = app.add_subcommand("generate", "generate a duplicated duplex network file");
    generate->add_option("--topology", g_topology, "complete|scale-free|small-world")->required();
    generate->add_option("--n", g_n, "number of agents")->required();
    generate->add_option("--k-out", g_k_out, "out-degree (scale-free, small-world)");
    generate->add_option("--clusters", g_clusters, "cluster count (small-world)");
    generate->add_option("--p-rewire", g_p_rewire, "rewiring probability (small-world)");
    generate->add_option("--seed", g_seed, "structural seed")->required();
    generate->add_option("--out", g_out, "output path")->required();

    // run
    std::string r_config, r_out, r_save_pop;
    auto* run_cmd = app.add_subcommand("run", "run one cell (first alpha, replicate 0)");
    run_cmd->add_option("--config", r_config, "experiment config (JSON)")->required();
    run_cmd->add_option("--out", r_out, "output CSV path")->required();
    run_cmd->add_option("--save-population", r_save_pop, "write the final population snapshot");

    // sweep
    std::string s_config, s_alphas, s_out;
    std::uint32_t s_replicates = 0;
    unsigned s_threads = 0;
    bool s_clusters = false;
    auto* sweep = app.add_subcommand("sweep", "run the full (alpha, replicate) grid");
    sweep->add_option("--config", s_config, "experiment config (JSON)")->required();
    sweep->add_option("--alphas", s_alphas, "comma-separated alpha list")->required();
    sweep->add_option("--replicates", s_replicates, "replicates per alpha")->required();
    sweep->add_option("--out", s_out, "output CSV path")->required();
    sweep->add_option("--threads", s_threads, "worker threads (0 = hardware)");
    sweep->add_flag("--measure-clusters", s_clusters, "also estimate cluster counts (slow)");

    // plot
    std::string p_in, p_measure, p_out, p_topology;
    auto* plot = app.add_subcommand("plot", "render an SVG chart from a result CSV");
    plot->add_option("--in", p_in, "result CSV")->required();
    plot->add_option("--measure", p_measure,
                     "pref_similarity|pref_congruence|assoc_similarity|mean_mutual_info")
        ->required();
    plot->add_option("--out", p_out, "output SVG path")->required();
    plot->add_option("--topology", p_topology, "restrict to one topology");

    // measure
    std::string m_population, m_mi_mode = "sequential";
    bool m_clusters = false;
    int m_k_max = 10, m_n_refs = 20;
    std::uint64_t m_seed = 0;
    auto* measure = app.add_subcommand("measure", "recompute measures from a population snapshot");
    measure->add_option("--population", m_population, "population snapshot (JSON)")->required();
    measure->add_option("--mi-mode", m_mi_mode, "sequential|association_coupled");
    measure->add_flag("--clusters", m_clusters, "also run the gap statistic");
    measure->add_option("--k-max", m_k_max, "gap statistic k range");
    measure->add_option("--n-refs", m_n_refs, "gap statistic reference sets");
    measure->add_option("--seed", m_seed, "gap statistic seed");

    // summary
    std::string y_in;
    auto* summary = app.add_subcommand("summary", "final-time mean/sd per (topology, alpha)");
    summary->add_option("--in", y_in, "result CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return cmd_generate(g_topology, g_n, g_k_out, g_clusters, g_p_rewire, g_seed, g_out);
        if (run_cmd->parsed()) return cmd_run(r_config, r_out, r_save_pop);
        if (sweep->parsed())
            return cmd_sweep(s_config, s_alphas, s_replicates, s_out, s_threads, s_clusters);
        if (plot->parsed()) return cmd_plot(p_in, p_measure, p_out, p_topology);
        if (measure->parsed())
            return cmd_measure(m_population, m_mi_mode, m_clusters, m_k_max, m_n_refs, m_seed);
        if (summary->parsed()) return cmd_summary(y_in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}
