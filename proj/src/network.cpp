#include "duplexsim/network.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "duplexsim/rng.hpp"

namespace duplexsim {

DirectedLayer generate_complete(std::uint32_t n) {
    if (n < 1) throw std::invalid_argument("generate_complete: n must be >= 1");
    DirectedLayer layer;
    layer.n = n;
    layer.out_adjacency.resize(n);
    for (NodeId v = 0; v < n; ++v) {
        auto& nbrs = layer.out_adjacency[v];
        nbrs.reserve(n - 1);
        for (NodeId u = 0; u < n; ++u)
            if (u != v) nbrs.push_back(u);
    }
    return layer;
}

DirectedLayer generate_scale_free(std::uint32_t n, std::uint32_t k_out, std::uint64_t seed) {
    if (k_out == 0) throw std::invalid_argument("generate_scale_free: k_out must be >= 1");
    if (k_out > n - 1)
        throw std::invalid_argument("generate_scale_free: k_out exceeds n-1");

    const std::uint32_t m0 = k_out + 1;
    DirectedLayer layer = generate_complete(m0);
    layer.n = n;
    layer.out_adjacency.resize(n);

    RandomStream rng(seed);

    // Roulette over (in-degree + k_out): each node enters the pool k_out
    // times at birth and once per received edge, so a pick is proportional
    // to total degree. The seed clique starts with in-degree k_out already.
    std::vector<NodeId> pool;
    pool.reserve(static_cast<std::size_t>(n) * 2 * k_out);
    for (NodeId v = 0; v < m0; ++v)
        for (std::uint32_t c = 0; c < 2 * k_out; ++c) pool.push_back(v);

    std::vector<char> picked(n, 0);
    std::vector<NodeId> targets;
    for (NodeId v = m0; v < n; ++v) {
        targets.clear();
        while (targets.size() < k_out) {
            const NodeId t = pool[rng.uniform_below(pool.size())];
            if (t == v || picked[t]) continue;
            picked[t] = 1;
            targets.push_back(t);
        }
        std::sort(targets.begin(), targets.end());
        for (const NodeId t : targets) {
            picked[t] = 0;
            pool.push_back(t);
        }
        layer.out_adjacency[v].assign(targets.begin(), targets.end());
        for (std::uint32_t c = 0; c < k_out; ++c) pool.push_back(v);
    }
    return layer;
}

DirectedLayer generate_small_world(std::uint32_t n, std::uint32_t clusters,
                                   std::uint32_t k_out, double p_rewire,
                                   std::uint64_t seed) {
    if (clusters == 0 || n % clusters != 0)
        throw std::invalid_argument("generate_small_world: clusters must divide n");
    const std::uint32_t block = n / clusters;
    if (block < 2)
        throw std::invalid_argument("generate_small_world: cluster size must be >= 2");
    if (k_out > block - 1)
        throw std::invalid_argument("generate_small_world: k_out exceeds cluster size - 1");
    if (p_rewire < 0.0 || p_rewire > 1.0)
        throw std::invalid_argument("generate_small_world: p_rewire must be in [0, 1]");

    DirectedLayer layer;
    layer.n = n;
    layer.out_adjacency.resize(n);
    for (NodeId v = 0; v < n; ++v) {
        const NodeId base = (v / block) * block;
        const std::uint32_t idx = v - base;
        auto& nbrs = layer.out_adjacency[v];
        nbrs.reserve(k_out);
        for (std::uint32_t d = 1; d <= k_out; ++d)
            nbrs.push_back(base + (idx + d) % block);
    }

    RandomStream rng(seed);
    for (NodeId v = 0; v < n; ++v) {
        auto& nbrs = layer.out_adjacency[v];
        std::unordered_set<NodeId> current(nbrs.begin(), nbrs.end());
        for (std::uint32_t pos = 0; pos < k_out; ++pos) {
            if (rng.uniform01() >= p_rewire) continue;
            // candidates: everything but v and its current out-neighborhood
            if (current.size() + 1 >= n) continue;
            NodeId candidate;
            do {
                candidate = static_cast<NodeId>(rng.uniform_below(n));
            } while (candidate == v || current.count(candidate));
            current.erase(nbrs[pos]);
            current.insert(candidate);
            nbrs[pos] = candidate;
        }
    }
    return layer;
}

DuplexNetwork duplicate(const DirectedLayer& layer) {
    DuplexNetwork net;
    net.n = layer.n;
    net.layer1 = layer;
    net.layer2 = layer;
    return net;
}

const std::vector<NodeId>& out_neighbors(const DuplexNetwork& net, int layer_id, NodeId node) {
    if (layer_id != 1 && layer_id != 2)
        throw std::out_of_range("out_neighbors: layer_id must be 1 or 2");
    if (node >= net.n) throw std::out_of_range("out_neighbors: node out of range");
    const DirectedLayer& layer = layer_id == 1 ? net.layer1 : net.layer2;
    return layer.out_adjacency[node];
}

void validate_layer(const DirectedLayer& layer) {
    if (layer.out_adjacency.size() != layer.n)
        throw std::runtime_error("layer: adjacency size differs from n");
    std::unordered_set<NodeId> seen;
    for (NodeId v = 0; v < layer.n; ++v) {
        seen.clear();
        for (const NodeId u : layer.out_adjacency[v]) {
            if (u >= layer.n)
                throw std::runtime_error("layer: edge target out of range");
            if (u == v) throw std::runtime_error("layer: self-loop");
            if (!seen.insert(u).second)
                throw std::runtime_error("layer: duplicate edge");
        }
    }
}

void save_duplex(const DuplexNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_duplex: cannot open " + path);
    out << "duplex n=" << net.n << "\n";
    for (int layer_id = 1; layer_id <= 2; ++layer_id) {
        const DirectedLayer& layer = layer_id == 1 ? net.layer1 : net.layer2;
        out << "layer " << layer_id << "\n";
        for (NodeId v = 0; v < net.n; ++v)
            for (const NodeId u : layer.out_adjacency[v])
                out << v << " " << u << "\n";
    }
    if (!out) throw std::runtime_error("save_duplex: write failed for " + path);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no, const std::string& what) {
    std::ostringstream msg;
    msg << path << ":" << line_no << ": " << what;
    throw std::runtime_error(msg.str());
}

}  // namespace

DuplexNetwork load_duplex(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_duplex: cannot open " + path);

    DuplexNetwork net;
    int current_layer = 0;  // 0 = before any layer header
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        std::istringstream fields(line);
        if (!have_header) {
            std::string tag, nspec;
            fields >> tag >> nspec;
            unsigned long n_val = 0;
            if (tag != "duplex" || nspec.rfind("n=", 0) != 0)
                parse_fail(path, line_no, "expected 'duplex n=<N>' header");
            try {
                n_val = std::stoul(nspec.substr(2));
            } catch (const std::exception&) {
                parse_fail(path, line_no, "bad node count in header");
            }
            net.n = static_cast<std::uint32_t>(n_val);
            net.layer1.n = net.layer2.n = net.n;
            net.layer1.out_adjacency.resize(net.n);
            net.layer2.out_adjacency.resize(net.n);
            have_header = true;
            continue;
        }
        std::string a, b;
        fields >> a >> b;
        if (a == "layer") {
            if (b == "1")
                current_layer = 1;
            else if (b == "2")
                current_layer = 2;
            else
                parse_fail(path, line_no, "expected 'layer 1' or 'layer 2'");
            continue;
        }
        if (current_layer == 0)
            parse_fail(path, line_no, "edge before any layer header");
        unsigned long src = 0, dst = 0;
        try {
            std::size_t used_a = 0, used_b = 0;
            src = std::stoul(a, &used_a);
            dst = std::stoul(b, &used_b);
            if (used_a != a.size() || used_b != b.size() || b.empty())
                throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            parse_fail(path, line_no, "expected '<src> <dst>' edge");
        }
        if (src >= net.n || dst >= net.n)
            parse_fail(path, line_no, "node index out of range (n=" + std::to_string(net.n) + ")");
        DirectedLayer& layer = current_layer == 1 ? net.layer1 : net.layer2;
        layer.out_adjacency[src].push_back(static_cast<NodeId>(dst));
    }
    if (!have_header) throw std::runtime_error(path + ": missing 'duplex n=<N>' header");
    try {
        validate_layer(net.layer1);
        validate_layer(net.layer2);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return net;
}

}  // namespace duplexsim
