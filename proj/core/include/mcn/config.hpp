#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mcn/common.hpp"

namespace mcn {

enum class MmMode { Full, Adjacent };
enum class ResidualMode { Self, Literal };
enum class LossKind { Ranking, Bce };
enum class NaMode { Excluded, NegativeOnly };
enum class BaseEncoderKind { Lookup, Window, File };

// Which edge families the document graph carries.
struct EdgeConfig {
  bool use_mm = true;
  bool use_me = true;
  bool use_ms = true;
  bool use_es = true;
  MmMode mm_mode = MmMode::Full;
  bool self_loops = true;

  bool any_enabled() const { return use_mm || use_me || use_ms || use_es; }
};

struct MarginConfig {
  double m_plus = -1.0;
  double m_minus = -2.0;
  NaMode na_mode = NaMode::Excluded;
};

// Everything that shapes the model itself (dimensions, graph, loss).
struct ModelConfig {
  // encoder
  BaseEncoderKind base_encoder = BaseEncoderKind::Lookup;
  int window_radius = 2;
  std::string vectors_dir;  // per-document vector files for the File base
  int d_word = 64;
  int d_compress = 128;  // token dimension after the linear map
  int d_etype = 20;
  int d_coref = 20;
  int coref_max = 42;
  // graph
  int d_node_type = 20;
  int d_distance = 20;
  EdgeConfig edges;
  // propagation
  int gcn_layers = 2;
  ResidualMode residual = ResidualMode::Self;
  // scorer
  int scorer_rank = 0;  // 0 = full bilinear, otherwise low-rank factor size
  // objective
  LossKind loss = LossKind::Ranking;
  MarginConfig margins;

  int d_hidden() const { return d_compress + d_etype + d_coref; }
  int d_node() const { return d_hidden() + d_node_type; }
};

struct TrainConfig {
  int epochs = 50;
  int batch_size = 4;
  std::uint64_t seed = 1;
  double lr_encoder = 1e-5;
  double lr_graph = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int negative_cap = 4;  // BCE: sampled negatives per positive; <= 0 keeps all
  int patience = 10;     // early-stop epochs without dev F1 improvement; <= 0 disables
  int checkpoint_every = 0;  // extra periodic checkpoints; 0 = best-only
  int threads = 1;
  int min_count = 1;  // vocabulary threshold
};

// Flat key=value view used by the config file, CLI overrides, and the
// checkpoint container.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap read_config_file(const std::string& path);
ConfigMap parse_config_text(const std::string& text);

ModelConfig model_config_from(const ConfigMap& map);
TrainConfig train_config_from(const ConfigMap& map);
ConfigMap to_map(const ModelConfig& model);
ConfigMap to_map(const ModelConfig& model, const TrainConfig& train);

std::string serialize_config(const ConfigMap& map);  // sorted key = value lines
std::uint64_t config_hash(const ConfigMap& map);     // FNV-1a over the serialization

}  // namespace mcn
