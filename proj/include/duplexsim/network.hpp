#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace duplexsim {

using NodeId = std::uint32_t;

// Directed graph as per-node ordered out-adjacency lists.
// Invariants: no self-loops, no duplicate edges within a node's list,
// every referenced node < n.
struct DirectedLayer {
    std::uint32_t n = 0;
    std::vector<std::vector<NodeId>> out_adjacency;

    std::size_t edge_count() const {
        std::size_t total = 0;
        for (const auto& nbrs : out_adjacency) total += nbrs.size();
        return total;
    }
};

// Two independent directed edge sets over one node set.
// layer1 carries association observations, layer2 carries preference influence.
struct DuplexNetwork {
    std::uint32_t n = 0;
    DirectedLayer layer1;
    DirectedLayer layer2;
};

// Every node points to every other node: out-degree n-1, n(n-1) edges.
DirectedLayer generate_complete(std::uint32_t n);

// Growing network; every node ends with out-degree exactly k_out. New nodes
// attach to existing targets with probability proportional to total degree
// (in-degree + k_out), which gives an in-degree tail exponent near 3.
// Seed graph: complete digraph on k_out+1 nodes. Throws on k_out > n-1 or k_out == 0.
DirectedLayer generate_scale_free(std::uint32_t n, std::uint32_t k_out, std::uint64_t seed);

// `clusters` disjoint cyclic blocks of size n/clusters; node v points to the
// next k_out block members in cyclic order (the full block when
// k_out == block size - 1). Each edge is then independently rewired with
// probability p_rewire to a uniformly chosen current non-neighbor.
// Throws when clusters does not divide n or k_out > n/clusters - 1.
DirectedLayer generate_small_world(std::uint32_t n, std::uint32_t clusters,
                                   std::uint32_t k_out, double p_rewire,
                                   std::uint64_t seed);

// Deep-copies the layer into both channels.
DuplexNetwork duplicate(const DirectedLayer& layer);

// layer_id is 1 or 2; throws std::out_of_range on bad layer or node.
const std::vector<NodeId>& out_neighbors(const DuplexNetwork& net, int layer_id, NodeId node);

// Text format:
//   duplex n=<N>
//   layer 1
//   <src> <dst>      (one edge per line, 0-based)
//   layer 2
//   <src> <dst>
// Blank lines and lines starting with '#' are ignored.
void save_duplex(const DuplexNetwork& net, const std::string& path);

// Throws std::runtime_error naming the offending line on parse or bounds errors.
DuplexNetwork load_duplex(const std::string& path);

// Checks the structural invariants; throws std::runtime_error on violation.
void validate_layer(const DirectedLayer& layer);

}  // namespace duplexsim
