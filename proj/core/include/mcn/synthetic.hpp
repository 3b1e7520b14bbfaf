#pragma once

#include <cstdint>
#include <vector>

#include "mcn/corpus.hpp"

namespace mcn {

// r_left composed with r_right yields r_composed. left/right are atomic
// relation ids; composed ids live above the atomic range.
struct CompositionRule {
  int left = 0;
  int right = 0;
  int composed = 0;
};

// Controlled corpus for multi-hop experiments. Documents are built from
// "chains": a two-hop chain contributes three entities (head, intermediate,
// tail) and two fact sentences "H rw1 M" / "M rw2 T" placed evidence_gap
// sentences apart, labeled only with the composed relation; a single-fact
// chain contributes two entities and one sentence "H rw T" labeled with the
// atomic relation. Every fact expressed in text is labeled, so incomplete
// annotation only ever enters by explicit label dropping downstream.
struct SyntheticSpec {
  int num_docs = 10;
  int entities_per_doc = 9;    // upper bound; chains are sized from this
  int sentences_per_doc = 12;  // extra sentences are filler
  int vocab_size = 60;         // name + filler token pool (relation words excluded)
  int atomic_relations = 2;
  std::vector<CompositionRule> rules;
  double two_hop_fraction = 0.0;

  // Layout knobs.
  int sentence_length = 10;
  int evidence_gap = 2;   // sentence distance between a chain's two facts
  int chain_stride = 4;   // sentences reserved per chain block
  // All intermediate entities in a document share one surface name, which
  // makes name matching useless for resolving which head pairs with which
  // tail.
  bool shared_intermediate_names = false;
  // Extra mentions of each intermediate entity planted into other chains'
  // fact sentences, spreading its sentence links across chains.
  int intermediate_noise_mentions = 0;

  int chains_per_doc() const;
  int relation_count() const;  // atomic + composed ids
};

// Pure function of (spec, seed): same arguments, byte-identical corpus.
std::vector<Document> gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// Relation table covering every id the spec can emit ("R0", "R1", ...).
RelationTable synthetic_relation_table(const SyntheticSpec& spec);

// Removes a seeded fraction of labels (rounded down per corpus) and returns
// the removed labels. Models incomplete annotation.
std::vector<std::pair<std::size_t, RelationLabel>> drop_labels(std::vector<Document>& docs,
                                                               double fraction,
                                                               std::uint64_t seed);

}  // namespace mcn
