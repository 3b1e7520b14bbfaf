#include "mcn/encoder.hpp"

namespace mcn {

TokenRepr encode_tokens(Tape& tape, const PreparedDoc& doc, const EncoderVars& params,
                        const ModelConfig& cfg) {
  Var base;
  switch (cfg.base_encoder) {
    case BaseEncoderKind::Lookup:
      base = tape.gather_rows(params.word_emb, doc.token_ids);
      break;
    case BaseEncoderKind::Window: {
      Var looked_up = tape.gather_rows(params.word_emb, doc.token_ids);
      base = tape.matmul(tape.constant(doc.window_mix), looked_up);
      break;
    }
    case BaseEncoderKind::File: {
      if (doc.file_vectors.rows() != doc.n_tokens) {
        throw ValidationError("encode_tokens: doc '" + doc.doc->doc_id +
                              "' has no loaded vectors");
      }
      if (doc.file_vectors.cols() != tape.value(params.compress_w).rows()) {
        throw ValidationError("encode_tokens: vector width " +
                              std::to_string(doc.file_vectors.cols()) +
                              " does not match d_word " +
                              std::to_string(tape.value(params.compress_w).rows()));
      }
      base = tape.constant(doc.file_vectors);
      break;
    }
  }
  Var compressed = tape.add_rowvec(tape.matmul(base, params.compress_w), params.compress_b);
  Var etype = tape.gather_rows(params.etype_emb, doc.tags.etype);
  Var coref = tape.gather_rows(params.coref_emb, doc.tags.coref);
  return {tape.concat_cols({compressed, etype, coref})};
}

}  // namespace mcn
