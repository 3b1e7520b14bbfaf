#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mcn/config.hpp"
#include "mcn/corpus.hpp"

namespace mcn {

// A mention with its document-level token offset and flat index. Mentions are
// ordered by (entity index, sentence, start); this is the node order of the
// graph's mention block.
struct FlatMention {
  int entity_idx = -1;
  int sent_id = -1;
  int start = 0;
  int end = 0;
  int doc_start = 0;  // offset of `start` in the flattened document
};

// Per-token tag assignment: entity-type ids and coreference ids, 0 for tokens
// outside any mention. Overlaps resolve to the earliest-starting, then
// longest mention.
struct TokenTags {
  std::vector<int> etype;  // 0 = none, else type id + 1
  std::vector<int> coref;  // 0 = none, else min(entity_idx + 1, coref_max)
};

TokenTags assign_token_tags(const Document& doc, const TypeTable& types, int coref_max);

// Everything about one document that downstream stages consume, resolved
// against a vocabulary and the model configuration. Pure; build once per
// document and reuse across epochs.
struct PreparedDoc {
  const Document* doc = nullptr;
  int n_tokens = 0;
  int n_mentions = 0;
  int n_entities = 0;
  int n_sentences = 0;
  std::vector<int> sent_offset;  // sentence id -> first flattened token index
  std::vector<int> token_ids;    // vocab ids, document order
  TokenTags tags;
  std::vector<FlatMention> mentions;
  Mat window_mix;    // n x n averaging matrix (Window base encoder only)
  Mat file_vectors;  // n x d precomputed rows (File base encoder only)
};

PreparedDoc prepare_document(const Document& doc, const Vocab& vocab, const TypeTable& types,
                             const ModelConfig& cfg);

// Reads the precomputed-vector format: a header line "n d" followed by n
// lines of d space-separated decimals.
Mat load_token_vectors(const std::string& path);

// File naming convention for per-document vector files inside vectors_dir.
std::string vector_file_name(const std::string& doc_id);

}  // namespace mcn
