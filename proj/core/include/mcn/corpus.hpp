#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mcn/common.hpp"

namespace mcn {

// A contiguous token span inside one sentence, pointing back at the entity
// cluster it belongs to. end is exclusive.
struct Mention {
  int entity_idx = -1;
  int sent_id = -1;
  int start = 0;
  int end = 0;
  std::vector<std::string> surface;
  std::string type;  // raw type string from the source record
};

// A cluster of coreferent mentions.
struct Entity {
  std::vector<Mention> mentions;
  std::string etype;  // majority type across mentions, ties lexicographic
  std::set<std::string> canonical_names;
};

struct RelationLabel {
  int head = -1;
  int tail = -1;
  int relation = -1;
  std::set<int> evidence;

  friend auto operator<=>(const RelationLabel&, const RelationLabel&) = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::vector<std::string>> sentences;
  std::vector<Entity> entities;
  std::vector<RelationLabel> labels;

  int total_tokens() const;
  int mention_count() const;
};

// Stable relation-name <-> dense-id mapping shared by every split. Built once
// from the training file (sorted names) and persisted as name<TAB>id lines.
class RelationTable {
 public:
  RelationTable() = default;
  explicit RelationTable(std::vector<std::string> names);

  static RelationTable load(const std::string& path);
  void save(const std::string& path) const;

  int id(const std::string& name) const;       // -1 when unknown
  const std::string& name(int id) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> ids_;
};

// Entity-type string <-> dense-id mapping, same discipline as RelationTable.
class TypeTable {
 public:
  TypeTable() = default;
  explicit TypeTable(std::vector<std::string> names);
  static TypeTable from_documents(const std::vector<Document>& docs);

  int id(const std::string& name) const;  // -1 when unknown
  const std::string& name(int id) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> ids_;
};

// Token vocabulary with ids 0 (padding) and 1 (unknown) reserved.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocab() = default;
  explicit Vocab(std::vector<std::string> tokens);  // non-reserved tokens, in id order

  int id(const std::string& token) const;  // kUnk for out-of-vocabulary
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;  // tokens_[0] = "<pad>", tokens_[1] = "<unk>"
  std::map<std::string, int> ids_;
};

// (head name, relation id, tail name) triples observed in the training split.
class FactSet {
 public:
  void insert(const std::string& head, int relation, const std::string& tail);
  bool contains(const std::string& head, int relation, const std::string& tail) const;
  std::size_t size() const { return facts_.size(); }

 private:
  std::set<std::tuple<std::string, int, std::string>> facts_;
};

// Reads a DocRED-schema JSON file. Relation names in `labels` are resolved
// through `table`; when `extend_table` is set, unseen names are collected,
// sorted, and appended (used on the first train-split load).
std::vector<Document> load_docred(const std::string& path, RelationTable& table,
                                  bool extend_table = false);

// Serializes documents back into the same schema (array of records with
// title/sents/vertexSet/labels).
void save_docred(const std::vector<Document>& docs, const RelationTable& table,
                 const std::string& path);

Vocab build_vocab(const std::vector<Document>& docs, int min_count);

FactSet training_fact_set(const std::vector<Document>& train_docs);

}  // namespace mcn
