#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mcn/encoder.hpp"
#include "mcn/prepared.hpp"
#include "mcn/tape.hpp"

namespace mcn {

enum class NodeKind { Mention, Entity, Sentence };

enum class EdgeKind : std::uint8_t { None = 0, MM, ME, MS, ES, SelfLoop };

// Signed log-spaced buckets over mention start distances: bucket 0 for
// delta = 0, then per sign one bucket per magnitude tier
// {1, 2..3, 4..7, ..., 256..511, >=512}; 21 buckets total.
constexpr int kDistanceBuckets = 21;
int distance_bucket(long long delta);

// Trainable graph tensors as tape handles:
//   dist_emb       kDistanceBuckets x d_distance
//   w_m            d_distance x 1
//   node_type_emb  3 x d_node_type (mention, entity, sentence)
struct GraphParamVars {
  Var dist_emb;
  Var w_m;
  Var node_type_emb;
};

// Plain-value version for snapshots and scalar helpers.
struct GraphParams {
  Mat dist_emb;
  Mat w_m;
  Mat node_type_emb;
};

// sigma(w_m . dist_emb[bucket]) for one bucket.
double mm_weight(int bucket, const GraphParams& params);

// Structure of one document's graph under an edge configuration: node-block
// layout, which mention pairs carry weighted edges, the constant part of the
// adjacency, and the per-entry edge labels. Node order is all mentions, then
// all entities, then all sentences.
struct GraphTopology {
  int n_mentions = 0;
  int n_entities = 0;
  int n_sentences = 0;
  int n_nodes = 0;
  std::vector<std::pair<int, int>> mm_pairs;  // node index pairs, i < j
  std::vector<int> mm_buckets;                // parallel to mm_pairs
  Mat base;                                   // binary families + self loops
  std::vector<EdgeKind> kinds;                // n_nodes * n_nodes, row-major

  EdgeKind kind(int i, int j) const {
    return kinds[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_nodes) +
                 static_cast<std::size_t>(j)];
  }
  int mention_node(int m) const { return m; }
  int entity_node(int e) const { return n_mentions + e; }
  int sentence_node(int s) const { return n_mentions + n_entities + s; }
};

GraphTopology build_topology(const PreparedDoc& doc, const EdgeConfig& cfg);

// N x d_node matrix: span averages of H concatenated with the node-type
// embedding row. Errors on an empty sentence (nothing to average).
Var build_nodes(Tape& tape, const PreparedDoc& doc, Var H, Var node_type_emb);

// MM edge weights, one sigmoid per topology pair (Px1).
Var mm_edge_weights(Tape& tape, const GraphTopology& topo, Var dist_emb, Var w_m);

// Full N x N symmetric adjacency: constant base plus scattered MM weights.
Var build_adjacency(Tape& tape, const GraphTopology& topo, Var dist_emb, Var w_m);

// Concrete snapshot for inspection and tests: node matrix, adjacency, and
// edge labels evaluated at the given parameter values.
struct DocGraph {
  GraphTopology topo;
  Mat nodes;
  Mat adjacency;
};

DocGraph snapshot_graph(const PreparedDoc& doc, const Mat& H, const GraphParams& params,
                        const EdgeConfig& cfg);

}  // namespace mcn
