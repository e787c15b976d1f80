#include "duplexsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace duplexsim {

using nlohmann::json;

std::string topology_name(Topology t) {
    switch (t) {
        case Topology::complete: return "complete";
        case Topology::scale_free: return "scale-free";
        case Topology::small_world: return "small-world";
        case Topology::file: return "file";
    }
    throw std::logic_error("topology_name: bad enum");
}

Topology topology_from_name(const std::string& name) {
    if (name == "complete") return Topology::complete;
    if (name == "scale-free") return Topology::scale_free;
    if (name == "small-world") return Topology::small_world;
    if (name == "file") return Topology::file;
    throw std::invalid_argument("unknown topology '" + name + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t alpha_index,
                          std::uint64_t replicate) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ splitmix64(alpha_index + 0x9E3779B97F4A7C15ULL));
    h = splitmix64(h ^ splitmix64(replicate + 0xD1B54A32D192ED03ULL));
    return h;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

DuplexNetwork build_network(const ExperimentSpec& spec, std::uint32_t replicate) {
    const std::uint64_t structure_seed =
        derive_seed(spec.model.master_seed, kStructureStream, replicate);
    switch (spec.topology) {
        case Topology::complete:
            return duplicate(generate_complete(spec.n));
        case Topology::scale_free:
            return duplicate(generate_scale_free(spec.n, spec.topology_params.k_out,
                                                 structure_seed));
        case Topology::small_world:
            return duplicate(generate_small_world(spec.n, spec.topology_params.clusters,
                                                  spec.topology_params.k_out,
                                                  spec.topology_params.p_rewire,
                                                  structure_seed));
        case Topology::file: {
            DuplexNetwork net = load_duplex(spec.topology_params.path);
            if (net.n != spec.n)
                throw std::invalid_argument("network file has n=" + std::to_string(net.n) +
                                            " but the spec says n=" + std::to_string(spec.n));
            return net;
        }
    }
    throw std::logic_error("build_network: bad enum");
}

namespace {

// the dynamics stream is keyed by the alpha VALUE (its bit pattern), so a
// cell's results do not depend on where alpha sits in the sweep grid
std::uint64_t alpha_stream_key(double alpha) {
    std::uint64_t bits = 0;
    static_assert(sizeof bits == sizeof alpha);
    std::memcpy(&bits, &alpha, sizeof bits);
    return bits;
}

}  // namespace

std::vector<ResultRow> run_single(const ExperimentSpec& spec, std::size_t alpha_index,
                                  std::uint32_t replicate) {
    if (alpha_index >= spec.alphas.size())
        throw std::invalid_argument("run_single: alpha_index out of range");
    if (spec.sample_every == 0)
        throw std::invalid_argument("run_single: sample_every must be >= 1");

    const DuplexNetwork net = build_network(spec, replicate);

    ModelConfig cfg = spec.model;
    cfg.alpha = spec.alphas[alpha_index];
    cfg.master_seed =
        derive_seed(spec.model.master_seed, alpha_stream_key(cfg.alpha), replicate);

    const std::string topo = topology_name(spec.topology);
    std::vector<ResultRow> rows;
    RandomStream gap_rng(derive_seed(cfg.master_seed, kStructureStream, 1));

    const SampleSink sink = [&](const RunProgress& progress, const Population& pop) {
        const MeasurementRecord rec = measure_population(pop, cfg, progress.t);
        ResultRow row;
        row.topology = topo;
        row.alpha = cfg.alpha;
        row.replicate = replicate;
        row.t = rec.t;
        row.pref_similarity = rec.pref_similarity;
        row.pref_congruence = rec.pref_congruence;
        row.assoc_similarity = rec.assoc_similarity;
        row.mean_mutual_info = rec.mean_mutual_info;
        row.excluded_pairs = rec.excluded_pairs;
        row.skipped_steps = progress.skipped_steps;
        if (spec.measure_clusters)
            row.optimal_clusters =
                optimal_cluster_count(pop, std::min<int>(10, static_cast<int>(pop.size())),
                                      20, gap_rng);
        rows.push_back(std::move(row));
    };

    run(net, cfg, spec.sample_every, sink);
    return rows;
}

Population final_population(const ExperimentSpec& spec, std::size_t alpha_index,
                            std::uint32_t replicate) {
    if (alpha_index >= spec.alphas.size())
        throw std::invalid_argument("final_population: alpha_index out of range");
    const DuplexNetwork net = build_network(spec, replicate);
    ModelConfig cfg = spec.model;
    cfg.alpha = spec.alphas[alpha_index];
    cfg.master_seed =
        derive_seed(spec.model.master_seed, alpha_stream_key(cfg.alpha), replicate);
    return run(net, cfg, spec.sample_every ? spec.sample_every : 1, {});
}

std::vector<ResultRow> run_sweep(const ExperimentSpec& spec, unsigned threads) {
    if (spec.alphas.empty()) throw std::invalid_argument("run_sweep: alphas must be nonempty");
    if (spec.replicates < 1) throw std::invalid_argument("run_sweep: replicates must be >= 1");
    for (const double alpha : spec.alphas)
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("run_sweep: alpha outside [0, 1]");

    struct Cell {
        std::size_t alpha_index;
        std::uint32_t replicate;
    };
    // canonical output order: by alpha value, then replicate
    std::vector<std::size_t> order(spec.alphas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return spec.alphas[a] < spec.alphas[b];
    });
    std::vector<Cell> cells;
    for (const std::size_t alpha_index : order)
        for (std::uint32_t rep = 0; rep < spec.replicates; ++rep)
            cells.push_back(Cell{alpha_index, rep});

    std::vector<std::vector<ResultRow>> cell_rows(cells.size());
    std::vector<std::exception_ptr> cell_errors(cells.size());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            try {
                cell_rows[idx] = run_single(spec, cells[idx].alpha_index, cells[idx].replicate);
            } catch (...) {
                cell_errors[idx] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        if (!cell_errors[idx]) continue;
        try {
            std::rethrow_exception(cell_errors[idx]);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "sweep cell (alpha=" << format_double(spec.alphas[cells[idx].alpha_index])
                << ", replicate=" << cells[idx].replicate << ") failed: " << e.what();
            throw std::runtime_error(msg.str());
        }
    }

    std::vector<ResultRow> table;
    for (auto& rows : cell_rows)
        for (auto& row : rows) table.push_back(std::move(row));
    return table;
}

namespace {

struct MeasureStats {
    double sum = 0.0, sum_sq = 0.0;
    std::uint32_t count = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++count;
    }
    std::optional<double> mean() const {
        if (count == 0) return std::nullopt;
        return sum / count;
    }
    std::optional<double> sd() const {
        if (count == 0) return std::nullopt;
        if (count == 1) return 0.0;  // single replicate: sd 0 by convention
        const double m = sum / count;
        const double var = (sum_sq - count * m * m) / (count - 1);
        return std::sqrt(std::max(0.0, var));
    }
};

}  // namespace

std::vector<SummaryRow> final_comparison(const std::vector<ResultRow>& table) {
    if (table.empty()) throw std::invalid_argument("final_comparison: empty table");
    std::uint64_t t_final = 0;
    for (const auto& row : table) t_final = std::max(t_final, row.t);

    using Key = std::pair<std::string, double>;
    std::map<Key, std::map<std::uint32_t, const ResultRow*>> finals;
    std::map<Key, std::set<std::uint32_t>> seen;
    for (const auto& row : table) {
        const Key key{row.topology, row.alpha};
        seen[key].insert(row.replicate);
        if (row.t == t_final) finals[key][row.replicate] = &row;
    }

    std::vector<SummaryRow> out;
    for (const auto& [key, replicates] : seen) {
        const auto& have = finals[key];
        for (const std::uint32_t rep : replicates) {
            if (!have.count(rep)) {
                std::ostringstream msg;
                msg << "final_comparison: cell (topology=" << key.first
                    << ", alpha=" << format_double(key.second) << ", replicate=" << rep
                    << ") has no row at final time t=" << t_final;
                throw std::runtime_error(msg.str());
            }
        }
        SummaryRow summary;
        summary.topology = key.first;
        summary.alpha = key.second;
        summary.t = t_final;
        summary.replicates = static_cast<std::uint32_t>(have.size());
        MeasureStats sim, cong, assoc, mi;
        for (const auto& [rep, row] : have) {
            (void)rep;
            if (row->pref_similarity) sim.add(*row->pref_similarity);
            if (row->pref_congruence) cong.add(*row->pref_congruence);
            if (row->assoc_similarity) assoc.add(*row->assoc_similarity);
            mi.add(row->mean_mutual_info);
        }
        summary.mean_pref_similarity = sim.mean();
        summary.sd_pref_similarity = sim.sd();
        summary.mean_pref_congruence = cong.mean();
        summary.sd_pref_congruence = cong.sd();
        summary.mean_assoc_similarity = assoc.mean();
        summary.sd_assoc_similarity = assoc.sd();
        summary.mean_mutual_info = mi.mean().value_or(0.0);
        summary.sd_mutual_info = mi.sd().value_or(0.0);
        out.push_back(std::move(summary));
    }
    return out;
}

// ---------------------------------------------------------------------------
// config / CSV / population IO
// ---------------------------------------------------------------------------
namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end())
            throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
}

ModelConfig model_from_json(const json& obj) {
    reject_unknown_keys(obj,
                        {"alpha", "k", "steps", "symmetric_R", "cs_normalize",
                         "cs_include_diagonal", "bounded_preferences", "retention",
                         "mi_mode", "master_seed"},
                        "model");
    ModelConfig cfg;
    cfg.alpha = obj.value("alpha", cfg.alpha);
    cfg.k = obj.value("k", cfg.k);
    cfg.steps = obj.value("steps", cfg.steps);
    cfg.symmetric_r = obj.value("symmetric_R", cfg.symmetric_r);
    cfg.cs_normalize = obj.value("cs_normalize", cfg.cs_normalize);
    cfg.cs_include_diagonal = obj.value("cs_include_diagonal", cfg.cs_include_diagonal);
    cfg.bounded_preferences = obj.value("bounded_preferences", cfg.bounded_preferences);
    if (obj.contains("retention")) {
        const std::string r = obj.at("retention").get<std::string>();
        if (r == "greater")
            cfg.retention = Retention::greater;
        else if (r == "less")
            cfg.retention = Retention::less;
        else
            throw std::invalid_argument("config: retention must be 'greater' or 'less'");
    }
    if (obj.contains("mi_mode")) {
        const std::string m = obj.at("mi_mode").get<std::string>();
        if (m == "sequential")
            cfg.mi_mode = MiMode::sequential;
        else if (m == "association_coupled")
            cfg.mi_mode = MiMode::association_coupled;
        else
            throw std::invalid_argument(
                "config: mi_mode must be 'sequential' or 'association_coupled'");
    }
    cfg.master_seed = obj.value("master_seed", cfg.master_seed);
    if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
        throw std::invalid_argument("config: model.alpha outside [0, 1]");
    if (cfg.k < 2) throw std::invalid_argument("config: model.k must be >= 2");
    return cfg;
}

}  // namespace

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config " + path + ": " + e.what());
    }
    reject_unknown_keys(doc,
                        {"topology", "topology_params", "n", "model", "alphas", "replicates",
                         "sample_every", "out_path", "measure_clusters"},
                        "top level");
    ExperimentSpec spec;
    if (doc.contains("topology"))
        spec.topology = topology_from_name(doc.at("topology").get<std::string>());
    if (doc.contains("topology_params")) {
        const json& tp = doc.at("topology_params");
        reject_unknown_keys(tp, {"k_out", "clusters", "p_rewire", "path"}, "topology_params");
        spec.topology_params.k_out = tp.value("k_out", spec.topology_params.k_out);
        spec.topology_params.clusters = tp.value("clusters", spec.topology_params.clusters);
        spec.topology_params.p_rewire = tp.value("p_rewire", spec.topology_params.p_rewire);
        spec.topology_params.path = tp.value("path", spec.topology_params.path);
    }
    spec.n = doc.value("n", spec.n);
    if (doc.contains("model")) spec.model = model_from_json(doc.at("model"));
    if (doc.contains("alphas")) spec.alphas = doc.at("alphas").get<std::vector<double>>();
    spec.replicates = doc.value("replicates", spec.replicates);
    spec.sample_every = doc.value("sample_every", spec.sample_every);
    spec.out_path = doc.value("out_path", spec.out_path);
    spec.measure_clusters = doc.value("measure_clusters", spec.measure_clusters);

    if (spec.alphas.empty()) throw std::invalid_argument("config: alphas must be nonempty");
    for (const double alpha : spec.alphas)
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("config: alpha outside [0, 1]");
    if (spec.replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
    if (spec.n < 2) throw std::invalid_argument("config: n must be >= 2");
    if (spec.sample_every == 0) throw std::invalid_argument("config: sample_every must be >= 1");
    if (spec.topology == Topology::file && spec.topology_params.path.empty())
        throw std::invalid_argument("config: topology 'file' needs topology_params.path");
    return spec;
}

namespace {

constexpr const char* kCsvHeader =
    "topology,alpha,replicate,t,pref_similarity,pref_congruence,assoc_similarity,"
    "mean_mutual_info,excluded_pairs,skipped_steps";

std::string optional_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string{};
}

}  // namespace

std::string result_csv_string(const std::vector<ResultRow>& rows) {
    const bool with_clusters =
        !rows.empty() && std::any_of(rows.begin(), rows.end(),
                                     [](const ResultRow& r) { return r.optimal_clusters.has_value(); });
    std::ostringstream out;
    out << kCsvHeader;
    if (with_clusters) out << ",optimal_clusters";
    out << "\n";
    for (const auto& row : rows) {
        out << row.topology << ',' << format_double(row.alpha) << ',' << row.replicate << ','
            << row.t << ',' << optional_field(row.pref_similarity) << ','
            << optional_field(row.pref_congruence) << ','
            << optional_field(row.assoc_similarity) << ','
            << format_double(row.mean_mutual_info) << ',' << row.excluded_pairs << ','
            << row.skipped_steps;
        if (with_clusters) {
            out << ',';
            if (row.optimal_clusters) out << *row.optimal_clusters;
        }
        out << "\n";
    }
    return out.str();
}

void write_result_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << result_csv_string(rows);
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<ResultRow> read_result_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool with_clusters = line == std::string(kCsvHeader) + ",optimal_clusters";
    if (!with_clusters && line != kCsvHeader)
        throw std::runtime_error(path + ": unexpected CSV header");

    std::vector<ResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        const std::size_t expected = with_clusters ? 11 : 10;
        if (fields.size() != expected)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(expected) + " fields");
        try {
            ResultRow row;
            row.topology = fields[0];
            row.alpha = std::stod(fields[1]);
            row.replicate = static_cast<std::uint32_t>(std::stoul(fields[2]));
            row.t = std::stoull(fields[3]);
            if (!fields[4].empty()) row.pref_similarity = std::stod(fields[4]);
            if (!fields[5].empty()) row.pref_congruence = std::stod(fields[5]);
            if (!fields[6].empty()) row.assoc_similarity = std::stod(fields[6]);
            row.mean_mutual_info = std::stod(fields[7]);
            row.excluded_pairs = std::stoull(fields[8]);
            row.skipped_steps = std::stoull(fields[9]);
            if (with_clusters && !fields[10].empty())
                row.optimal_clusters = std::stoi(fields[10]);
            rows.push_back(std::move(row));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad field value");
        }
    }
    return rows;
}

void save_population(const Population& pop, const std::string& path) {
    json doc;
    doc["k"] = pop.k;
    json agents = json::array();
    for (const auto& agent : pop.agents) {
        json a;
        a["preference"] = agent.preference;
        json r_rows = json::array();
        for (int i = 0; i < agent.k; ++i) {
            json row = json::array();
            for (int j = 0; j < agent.k; ++j) row.push_back(agent.r(i, j));
            r_rows.push_back(std::move(row));
        }
        a["association"] = std::move(r_rows);
        agents.push_back(std::move(a));
    }
    doc["agents"] = std::move(agents);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << doc.dump(1) << "\n";
    if (!out) throw std::runtime_error("write failed for " + path);
}

Population load_population(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    Population pop;
    pop.k = doc.at("k").get<int>();
    if (pop.k < 2) throw std::runtime_error(path + ": k must be >= 2");
    for (const json& a : doc.at("agents")) {
        AgentState agent;
        agent.k = pop.k;
        agent.preference = a.at("preference").get<std::vector<double>>();
        if (agent.preference.size() != static_cast<std::size_t>(pop.k))
            throw std::runtime_error(path + ": preference length differs from k");
        const json& r_rows = a.at("association");
        if (r_rows.size() != static_cast<std::size_t>(pop.k))
            throw std::runtime_error(path + ": association row count differs from k");
        agent.association.reserve(static_cast<std::size_t>(pop.k) * pop.k);
        for (const json& row : r_rows) {
            const auto values = row.get<std::vector<double>>();
            if (values.size() != static_cast<std::size_t>(pop.k))
                throw std::runtime_error(path + ": association row length differs from k");
            agent.association.insert(agent.association.end(), values.begin(), values.end());
        }
        pop.agents.push_back(std::move(agent));
    }
    if (pop.agents.empty()) throw std::runtime_error(path + ": no agents");
    return pop;
}

}  // namespace duplexsim
