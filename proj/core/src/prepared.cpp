#include "mcn/prepared.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mcn {

TokenTags assign_token_tags(const Document& doc, const TypeTable& types, int coref_max) {
  int n = doc.total_tokens();
  TokenTags tags;
  tags.etype.assign(static_cast<std::size_t>(n), 0);
  tags.coref.assign(static_cast<std::size_t>(n), 0);

  std::vector<int> sent_offset;
  int off = 0;
  for (const auto& s : doc.sentences) {
    sent_offset.push_back(off);
    off += static_cast<int>(s.size());
  }

  struct Span {
    int doc_start;
    int len;
    int entity_idx;
    int type_id;
  };
  std::vector<Span> spans;
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    const Entity& ent = doc.entities[e];
    int type_id = types.id(ent.etype);
    for (const Mention& m : ent.mentions) {
      Span s;
      s.doc_start = sent_offset[static_cast<std::size_t>(m.sent_id)] + m.start;
      s.len = m.end - m.start;
      s.entity_idx = static_cast<int>(e);
      s.type_id = type_id < 0 ? -1 : type_id + 1;
      spans.push_back(s);
    }
  }
  // earliest-starting first, longest breaking ties; later spans do not steal
  // tokens already claimed
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    if (a.doc_start != b.doc_start) return a.doc_start < b.doc_start;
    if (a.len != b.len) return a.len > b.len;
    return a.entity_idx < b.entity_idx;
  });
  std::vector<bool> claimed(static_cast<std::size_t>(n), false);
  for (const Span& s : spans) {
    for (int t = s.doc_start; t < s.doc_start + s.len; ++t) {
      auto ti = static_cast<std::size_t>(t);
      if (claimed[ti]) continue;
      claimed[ti] = true;
      tags.etype[ti] = s.type_id < 0 ? 0 : s.type_id;
      tags.coref[ti] = std::min(s.entity_idx + 1, coref_max);
    }
  }
  return tags;
}

PreparedDoc prepare_document(const Document& doc, const Vocab& vocab, const TypeTable& types,
                             const ModelConfig& cfg) {
  PreparedDoc p;
  p.doc = &doc;
  p.n_tokens = doc.total_tokens();
  p.n_entities = static_cast<int>(doc.entities.size());
  p.n_sentences = static_cast<int>(doc.sentences.size());
  if (p.n_tokens == 0) {
    throw ValidationError("prepare_document: doc '" + doc.doc_id + "' has no tokens");
  }

  int off = 0;
  for (const auto& s : doc.sentences) {
    p.sent_offset.push_back(off);
    off += static_cast<int>(s.size());
  }
  p.token_ids.reserve(static_cast<std::size_t>(p.n_tokens));
  for (const auto& s : doc.sentences) {
    for (const auto& tok : s) p.token_ids.push_back(vocab.id(tok));
  }
  p.tags = assign_token_tags(doc, types, cfg.coref_max);

  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    for (const Mention& m : doc.entities[e].mentions) {
      FlatMention fm;
      fm.entity_idx = static_cast<int>(e);
      fm.sent_id = m.sent_id;
      fm.start = m.start;
      fm.end = m.end;
      fm.doc_start = p.sent_offset[static_cast<std::size_t>(m.sent_id)] + m.start;
      p.mentions.push_back(fm);
    }
  }
  std::sort(p.mentions.begin(), p.mentions.end(), [](const FlatMention& a, const FlatMention& b) {
    if (a.entity_idx != b.entity_idx) return a.entity_idx < b.entity_idx;
    if (a.sent_id != b.sent_id) return a.sent_id < b.sent_id;
    return a.start < b.start;
  });
  p.n_mentions = static_cast<int>(p.mentions.size());

  if (cfg.base_encoder == BaseEncoderKind::Window) {
    // Window averaging stays inside the sentence; radius 0 degenerates to the
    // plain lookup.
    p.window_mix = Mat::Zero(p.n_tokens, p.n_tokens);
    for (int s = 0; s < p.n_sentences; ++s) {
      int begin = p.sent_offset[static_cast<std::size_t>(s)];
      int len = static_cast<int>(doc.sentences[static_cast<std::size_t>(s)].size());
      for (int t = 0; t < len; ++t) {
        int lo = std::max(0, t - cfg.window_radius);
        int hi = std::min(len - 1, t + cfg.window_radius);
        double w = 1.0 / static_cast<double>(hi - lo + 1);
        for (int u = lo; u <= hi; ++u) {
          p.window_mix(begin + t, begin + u) = w;
        }
      }
    }
  }

  if (cfg.base_encoder == BaseEncoderKind::File) {
    if (cfg.vectors_dir.empty()) {
      throw ValidationError("prepare_document: base_encoder=file needs vectors_dir");
    }
    std::string path = cfg.vectors_dir + "/" + vector_file_name(doc.doc_id);
    p.file_vectors = load_token_vectors(path);
    if (p.file_vectors.rows() != p.n_tokens) {
      throw ValidationError("prepare_document: " + path + " has " +
                            std::to_string(p.file_vectors.rows()) + " vectors but doc '" +
                            doc.doc_id + "' has " + std::to_string(p.n_tokens) + " tokens");
    }
  }
  return p;
}

Mat load_token_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_token_vectors: cannot open " + path);
  long long n = 0, d = 0;
  if (!(in >> n >> d) || n < 1 || d < 1) {
    throw ParseError("load_token_vectors: bad header in " + path);
  }
  Mat m(n, d);
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < d; ++j) {
      if (!(in >> m(i, j))) {
        throw ParseError("load_token_vectors: truncated data in " + path + " at row " +
                         std::to_string(i));
      }
    }
  }
  return m;
}

std::string vector_file_name(const std::string& doc_id) {
  std::string name = doc_id;
  for (char& c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return name + ".vec";
}

}  // namespace mcn
