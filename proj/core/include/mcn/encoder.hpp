#pragma once

#include "mcn/prepared.hpp"
#include "mcn/tape.hpp"

namespace mcn {

// Tape handles for the encoder's trainable tensors.
//   word_emb   |V| x d_word
//   compress   d_word x d_compress, with bias 1 x d_compress
//   etype_emb  (T+1) x d_etype, row 0 reserved for tokens outside mentions
//   coref_emb  (coref_max+1) x d_coref, row 0 reserved likewise
struct EncoderVars {
  Var word_emb;
  Var compress_w;
  Var compress_b;
  Var etype_emb;
  Var coref_emb;
};

// Per-token representation of the whole document: n x d_hidden, row order =
// flattened (sentence, position) order as recorded in PreparedDoc.
struct TokenRepr {
  Var H;
};

// Row i = [ compress(base(x)_i) ; etype_emb[tag_i] ; coref_emb[coref_i] ].
// The base encoder is the pluggable stand-in for a contextual model: a plain
// embedding lookup, a within-sentence window average of lookups, or
// precomputed per-token vectors from a file.
TokenRepr encode_tokens(Tape& tape, const PreparedDoc& doc, const EncoderVars& params,
                        const ModelConfig& cfg);

}  // namespace mcn
