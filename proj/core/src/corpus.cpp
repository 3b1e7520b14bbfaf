#include "mcn/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mcn {

using nlohmann::json;

int Document::total_tokens() const {
  int n = 0;
  for (const auto& s : sentences) n += static_cast<int>(s.size());
  return n;
}

int Document::mention_count() const {
  int n = 0;
  for (const auto& e : entities) n += static_cast<int>(e.mentions.size());
  return n;
}

RelationTable::RelationTable(std::vector<std::string> names) : names_(std::move(names)) {
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (!ids_.emplace(names_[static_cast<std::size_t>(i)], i).second) {
      throw ValidationError("RelationTable: duplicate relation name '" +
                            names_[static_cast<std::size_t>(i)] + "'");
    }
  }
}

RelationTable RelationTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("RelationTable: cannot open " + path);
  std::vector<std::string> names;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("RelationTable: missing tab on line " + std::to_string(lineno) + " of " +
                       path);
    }
    std::string name = line.substr(0, tab);
    int id = std::stoi(line.substr(tab + 1));
    if (id != static_cast<int>(names.size())) {
      throw ParseError("RelationTable: ids must be dense and ordered in " + path);
    }
    names.push_back(std::move(name));
  }
  return RelationTable(std::move(names));
}

void RelationTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("RelationTable: cannot write " + path);
  for (int i = 0; i < size(); ++i) {
    out << names_[static_cast<std::size_t>(i)] << '\t' << i << '\n';
  }
}

int RelationTable::id(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

const std::string& RelationTable::name(int id) const {
  if (id < 0 || id >= size()) throw ValidationError("RelationTable: id out of range");
  return names_[static_cast<std::size_t>(id)];
}

TypeTable::TypeTable(std::vector<std::string> names) : names_(std::move(names)) {
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (!ids_.emplace(names_[static_cast<std::size_t>(i)], i).second) {
      throw ValidationError("TypeTable: duplicate type name '" +
                            names_[static_cast<std::size_t>(i)] + "'");
    }
  }
}

TypeTable TypeTable::from_documents(const std::vector<Document>& docs) {
  std::set<std::string> seen;
  for (const Document& d : docs) {
    for (const Entity& e : d.entities) seen.insert(e.etype);
  }
  return TypeTable(std::vector<std::string>(seen.begin(), seen.end()));
}

int TypeTable::id(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

const std::string& TypeTable::name(int id) const {
  if (id < 0 || id >= size()) throw ValidationError("TypeTable: id out of range");
  return names_[static_cast<std::size_t>(id)];
}

Vocab::Vocab(std::vector<std::string> tokens) {
  tokens_.reserve(tokens.size() + 2);
  tokens_.push_back("<pad>");
  tokens_.push_back("<unk>");
  for (auto& t : tokens) tokens_.push_back(std::move(t));
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    ids_.emplace(tokens_[static_cast<std::size_t>(i)], i);
  }
}

int Vocab::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) throw ValidationError("Vocab: id out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

void FactSet::insert(const std::string& head, int relation, const std::string& tail) {
  facts_.emplace(head, relation, tail);
}

bool FactSet::contains(const std::string& head, int relation, const std::string& tail) const {
  return facts_.count({head, relation, tail}) > 0;
}

namespace {

// Majority type over an entity's mentions; ties broken lexicographically
// (std::map iteration order makes the first max the lexicographically
// smallest).
std::string majority_type(const Entity& e) {
  std::map<std::string, int> counts;
  for (const Mention& m : e.mentions) counts[m.type]++;
  std::string best;
  int best_count = -1;
  for (const auto& [name, count] : counts) {
    if (count > best_count) {
      best = name;
      best_count = count;
    }
  }
  return best;
}

std::string mention_name(const Mention& m) {
  std::ostringstream joined;
  for (std::size_t k = 0; k < m.surface.size(); ++k) {
    if (k) joined << ' ';
    joined << m.surface[k];
  }
  return joined.str();
}

Document parse_record(const json& rec, std::size_t index, const RelationTable& table) {
  Document doc;
  doc.doc_id = rec.value("title", "doc" + std::to_string(index));

  for (const auto& sent : rec.at("sents")) {
    std::vector<std::string> toks;
    for (const auto& tok : sent) toks.push_back(tok.get<std::string>());
    doc.sentences.push_back(std::move(toks));
  }

  int entity_idx = 0;
  for (const auto& cluster : rec.at("vertexSet")) {
    Entity ent;
    for (const auto& m : cluster) {
      Mention mention;
      mention.entity_idx = entity_idx;
      mention.sent_id = m.at("sent_id").get<int>();
      const auto& pos = m.at("pos");
      mention.start = pos.at(0).get<int>();
      mention.end = pos.at(1).get<int>();
      mention.type = m.value("type", "");
      if (mention.sent_id < 0 || mention.sent_id >= static_cast<int>(doc.sentences.size())) {
        throw ValidationError("doc '" + doc.doc_id + "': mention of entity " +
                              std::to_string(entity_idx) + " has sent_id out of range");
      }
      int sent_len =
          static_cast<int>(doc.sentences[static_cast<std::size_t>(mention.sent_id)].size());
      if (!(0 <= mention.start && mention.start < mention.end && mention.end <= sent_len)) {
        throw ValidationError("doc '" + doc.doc_id + "': mention of entity " +
                              std::to_string(entity_idx) + " has span [" +
                              std::to_string(mention.start) + "," + std::to_string(mention.end) +
                              ") outside sentence of length " + std::to_string(sent_len));
      }
      const auto& sent = doc.sentences[static_cast<std::size_t>(mention.sent_id)];
      mention.surface.assign(sent.begin() + mention.start, sent.begin() + mention.end);
      std::string name = m.value("name", "");
      if (name.empty()) name = mention_name(mention);
      ent.canonical_names.insert(name);
      ent.mentions.push_back(std::move(mention));
    }
    if (ent.mentions.empty()) {
      throw ValidationError("doc '" + doc.doc_id + "': entity " + std::to_string(entity_idx) +
                            " has no mentions");
    }
    ent.etype = majority_type(ent);
    doc.entities.push_back(std::move(ent));
    ++entity_idx;
  }

  if (rec.contains("labels")) {
    std::set<std::tuple<int, int, int>> seen;  // duplicate (h,t,r) dropped silently
    for (const auto& l : rec.at("labels")) {
      RelationLabel label;
      label.head = l.at("h").get<int>();
      label.tail = l.at("t").get<int>();
      std::string rname = l.at("r").is_string() ? l.at("r").get<std::string>()
                                                : std::to_string(l.at("r").get<int>());
      label.relation = table.id(rname);
      if (label.relation < 0) {
        throw ValidationError("doc '" + doc.doc_id + "': unknown relation '" + rname +
                              "' (relation table is frozen)");
      }
      if (label.head == label.tail) {
        throw ValidationError("doc '" + doc.doc_id + "': label with head == tail");
      }
      int n_ent = static_cast<int>(doc.entities.size());
      if (label.head < 0 || label.head >= n_ent || label.tail < 0 || label.tail >= n_ent) {
        throw ValidationError("doc '" + doc.doc_id + "': label entity index out of range");
      }
      if (l.contains("evidence")) {
        for (const auto& ev : l.at("evidence")) {
          int sid = ev.get<int>();
          if (sid < 0 || sid >= static_cast<int>(doc.sentences.size())) {
            throw ValidationError("doc '" + doc.doc_id + "': evidence sentence out of range");
          }
          label.evidence.insert(sid);
        }
      }
      if (seen.emplace(label.head, label.tail, label.relation).second) {
        doc.labels.push_back(std::move(label));
      }
    }
  }
  return doc;
}

}  // namespace

std::vector<Document> load_docred(const std::string& path, RelationTable& table,
                                  bool extend_table) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_docred: cannot open " + path);
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& e) {
    throw ParseError("load_docred: " + path + ": " + e.what());
  }
  if (!root.is_array()) throw ParseError("load_docred: top-level JSON must be an array");

  // When extending, ids are assigned over the sorted union of existing and
  // newly observed relation names so that a fresh table is deterministic.
  if (extend_table) {
    std::set<std::string> names(table.names().begin(), table.names().end());
    for (const auto& rec : root) {
      if (!rec.contains("labels")) continue;
      for (const auto& l : rec.at("labels")) {
        names.insert(l.at("r").is_string() ? l.at("r").get<std::string>()
                                           : std::to_string(l.at("r").get<int>()));
      }
    }
    table = RelationTable(std::vector<std::string>(names.begin(), names.end()));
  }

  std::vector<Document> docs;
  docs.reserve(root.size());
  for (std::size_t i = 0; i < root.size(); ++i) {
    try {
      docs.push_back(parse_record(root[i], i, table));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError("load_docred: record " + std::to_string(i) + ": " + e.what());
    }
  }
  return docs;
}

void save_docred(const std::vector<Document>& docs, const RelationTable& table,
                 const std::string& path) {
  json root = json::array();
  for (const Document& doc : docs) {
    json rec;
    rec["title"] = doc.doc_id;
    json sents = json::array();
    for (const auto& s : doc.sentences) sents.push_back(s);
    rec["sents"] = std::move(sents);
    json vertex_set = json::array();
    for (const Entity& ent : doc.entities) {
      json cluster = json::array();
      for (const Mention& m : ent.mentions) {
        json jm;
        jm["name"] = mention_name(m);
        jm["sent_id"] = m.sent_id;
        jm["pos"] = {m.start, m.end};
        jm["type"] = m.type;
        cluster.push_back(std::move(jm));
      }
      vertex_set.push_back(std::move(cluster));
    }
    rec["vertexSet"] = std::move(vertex_set);
    json labels = json::array();
    for (const RelationLabel& l : doc.labels) {
      json jl;
      jl["h"] = l.head;
      jl["t"] = l.tail;
      jl["r"] = table.name(l.relation);
      jl["evidence"] = std::vector<int>(l.evidence.begin(), l.evidence.end());
      labels.push_back(std::move(jl));
    }
    rec["labels"] = std::move(labels);
    root.push_back(std::move(rec));
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("save_docred: cannot write " + path);
  out << root.dump(1) << '\n';
}

Vocab build_vocab(const std::vector<Document>& docs, int min_count) {
  if (min_count < 1) throw ValidationError("build_vocab: min_count must be >= 1");
  if (docs.empty()) throw ValidationError("build_vocab: empty corpus");
  std::map<std::string, long long> freq;
  for (const Document& d : docs) {
    for (const auto& sent : d.sentences) {
      for (const auto& tok : sent) freq[tok]++;
    }
  }
  std::vector<std::pair<std::string, long long>> items(freq.begin(), freq.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> kept;
  for (auto& [tok, count] : items) {
    if (count >= min_count) kept.push_back(tok);
  }
  return Vocab(std::move(kept));
}

FactSet training_fact_set(const std::vector<Document>& train_docs) {
  FactSet facts;
  for (const Document& d : train_docs) {
    for (const RelationLabel& l : d.labels) {
      const Entity& head = d.entities[static_cast<std::size_t>(l.head)];
      const Entity& tail = d.entities[static_cast<std::size_t>(l.tail)];
      for (const std::string& hname : head.canonical_names) {
        for (const std::string& tname : tail.canonical_names) {
          facts.insert(hname, l.relation, tname);
        }
      }
    }
  }
  return facts;
}

}  // namespace mcn
