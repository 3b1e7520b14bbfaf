#pragma once

#include <map>
#include <string>
#include <vector>

#include "mcn/common.hpp"
#include "mcn/config.hpp"

namespace mcn {

// Learning-rate group: the base-encoder parameters train at one rate, the
// graph/scorer parameters at another.
enum class ParamGroup { Encoder, Graph };

// Named registry of every trainable tensor. Registration order is fixed by
// the model builder and drives deterministic iteration everywhere (gradient
// accumulation, optimizer steps, checkpoints).
class ParamSet {
 public:
  struct Entry {
    std::string name;
    ParamGroup group = ParamGroup::Graph;
    Mat value;
    Mat adam_m;  // optimizer state lives here but is not checkpointed
    Mat adam_v;
  };

  Mat& add(const std::string& name, ParamGroup group, Mat value);
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  Mat& at(const std::string& name);
  const Mat& at(const std::string& name) const;
  Entry& entry(std::size_t i) { return entries_[i]; }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
};

// Versioned binary container: config hash + config text + the string tables
// the model was built against + every parameter tensor. Written with fixed
// little-endian layout so identical state produces identical bytes.
struct Checkpoint {
  ConfigMap config;
  std::vector<std::string> vocab_tokens;     // non-reserved tokens in id order
  std::vector<std::string> relation_names;
  std::vector<std::string> etype_names;
  ParamSet params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mcn
