#include "mcn/config.hpp"

#include <fstream>
#include <sstream>

namespace mcn {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

int to_int(const ConfigMap& m, const std::string& key, int fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' is not an integer: " + it->second);
  }
}

double to_double(const ConfigMap& m, const std::string& key, double fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' is not a number: " + it->second);
  }
}

bool to_bool(const ConfigMap& m, const std::string& key, bool fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError("config: key '" + key + "' is not a boolean: " + v);
}

std::string to_str(const ConfigMap& m, const std::string& key, const std::string& fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

std::uint64_t to_u64(const ConfigMap& m, const std::string& key, std::uint64_t fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ValidationError("config: key '" + key + "' is not an unsigned integer: " + it->second);
  }
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config: line " + std::to_string(lineno) + " has no '='");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("config: line " + std::to_string(lineno) + " has an empty key");
    }
    map[key] = value;
  }
  return map;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ModelConfig model_config_from(const ConfigMap& m) {
  ModelConfig c;
  std::string base = to_str(m, "base_encoder", "lookup");
  if (base == "lookup") {
    c.base_encoder = BaseEncoderKind::Lookup;
  } else if (base == "window") {
    c.base_encoder = BaseEncoderKind::Window;
  } else if (base == "file") {
    c.base_encoder = BaseEncoderKind::File;
  } else {
    throw ValidationError("config: unknown base_encoder '" + base + "'");
  }
  c.window_radius = to_int(m, "window_radius", c.window_radius);
  c.vectors_dir = to_str(m, "vectors_dir", c.vectors_dir);
  c.d_word = to_int(m, "d_word", c.d_word);
  c.d_compress = to_int(m, "d_compress", c.d_compress);
  c.d_etype = to_int(m, "d_etype", c.d_etype);
  c.d_coref = to_int(m, "d_coref", c.d_coref);
  c.coref_max = to_int(m, "coref_max", c.coref_max);
  c.d_node_type = to_int(m, "d_node_type", c.d_node_type);
  c.d_distance = to_int(m, "d_distance", c.d_distance);

  c.edges.use_mm = to_bool(m, "use_mm", c.edges.use_mm);
  c.edges.use_me = to_bool(m, "use_me", c.edges.use_me);
  c.edges.use_ms = to_bool(m, "use_ms", c.edges.use_ms);
  c.edges.use_es = to_bool(m, "use_es", c.edges.use_es);
  c.edges.self_loops = to_bool(m, "self_loops", c.edges.self_loops);
  std::string mm = to_str(m, "mm_mode", "full");
  if (mm == "full") {
    c.edges.mm_mode = MmMode::Full;
  } else if (mm == "adjacent") {
    c.edges.mm_mode = MmMode::Adjacent;
  } else {
    throw ValidationError("config: unknown mm_mode '" + mm + "'");
  }

  c.gcn_layers = to_int(m, "gcn_layers", c.gcn_layers);
  std::string res = to_str(m, "residual_mode", "self");
  if (res == "self") {
    c.residual = ResidualMode::Self;
  } else if (res == "literal") {
    c.residual = ResidualMode::Literal;
  } else {
    throw ValidationError("config: unknown residual_mode '" + res + "'");
  }
  c.scorer_rank = to_int(m, "scorer_rank", c.scorer_rank);

  std::string loss = to_str(m, "loss", "ranking");
  if (loss == "ranking") {
    c.loss = LossKind::Ranking;
  } else if (loss == "bce") {
    c.loss = LossKind::Bce;
  } else {
    throw ValidationError("config: unknown loss '" + loss + "'");
  }
  c.margins.m_plus = to_double(m, "m_plus", c.margins.m_plus);
  c.margins.m_minus = to_double(m, "m_minus", c.margins.m_minus);
  std::string na = to_str(m, "na_mode", "excluded");
  if (na == "excluded") {
    c.margins.na_mode = NaMode::Excluded;
  } else if (na == "negative_only") {
    c.margins.na_mode = NaMode::NegativeOnly;
  } else {
    throw ValidationError("config: unknown na_mode '" + na + "'");
  }

  if (c.d_word < 1 || c.d_compress < 1 || c.d_etype < 1 || c.d_coref < 1 ||
      c.d_node_type < 1 || c.d_distance < 1) {
    throw ValidationError("config: all embedding dimensions must be positive");
  }
  if (c.gcn_layers < 1) throw ValidationError("config: gcn_layers must be >= 1");
  if (c.coref_max < 1) throw ValidationError("config: coref_max must be >= 1");
  if (c.window_radius < 0) throw ValidationError("config: window_radius must be >= 0");
  if (!c.edges.any_enabled()) {
    throw ValidationError("config: at least one edge family must be enabled");
  }
  return c;
}

TrainConfig train_config_from(const ConfigMap& m) {
  TrainConfig c;
  c.epochs = to_int(m, "epochs", c.epochs);
  c.batch_size = to_int(m, "batch_size", c.batch_size);
  c.seed = to_u64(m, "seed", c.seed);
  c.lr_encoder = to_double(m, "lr_encoder", c.lr_encoder);
  c.lr_graph = to_double(m, "lr_graph", c.lr_graph);
  c.beta1 = to_double(m, "beta1", c.beta1);
  c.beta2 = to_double(m, "beta2", c.beta2);
  c.adam_eps = to_double(m, "adam_eps", c.adam_eps);
  c.negative_cap = to_int(m, "negative_cap", c.negative_cap);
  c.patience = to_int(m, "patience", c.patience);
  c.checkpoint_every = to_int(m, "checkpoint_every", c.checkpoint_every);
  c.threads = to_int(m, "threads", c.threads);
  c.min_count = to_int(m, "min_count", c.min_count);
  if (c.batch_size < 1) throw ValidationError("config: batch_size must be >= 1");
  if (c.epochs < 0) throw ValidationError("config: epochs must be >= 0");
  if (c.lr_encoder <= 0 || c.lr_graph <= 0) {
    throw ValidationError("config: learning rates must be positive");
  }
  if (c.threads < 1) throw ValidationError("config: threads must be >= 1");
  if (c.min_count < 1) throw ValidationError("config: min_count must be >= 1");
  return c;
}

ConfigMap to_map(const ModelConfig& c) {
  ConfigMap m;
  switch (c.base_encoder) {
    case BaseEncoderKind::Lookup: m["base_encoder"] = "lookup"; break;
    case BaseEncoderKind::Window: m["base_encoder"] = "window"; break;
    case BaseEncoderKind::File: m["base_encoder"] = "file"; break;
  }
  m["window_radius"] = std::to_string(c.window_radius);
  if (!c.vectors_dir.empty()) m["vectors_dir"] = c.vectors_dir;
  m["d_word"] = std::to_string(c.d_word);
  m["d_compress"] = std::to_string(c.d_compress);
  m["d_etype"] = std::to_string(c.d_etype);
  m["d_coref"] = std::to_string(c.d_coref);
  m["coref_max"] = std::to_string(c.coref_max);
  m["d_node_type"] = std::to_string(c.d_node_type);
  m["d_distance"] = std::to_string(c.d_distance);
  m["use_mm"] = c.edges.use_mm ? "true" : "false";
  m["use_me"] = c.edges.use_me ? "true" : "false";
  m["use_ms"] = c.edges.use_ms ? "true" : "false";
  m["use_es"] = c.edges.use_es ? "true" : "false";
  m["self_loops"] = c.edges.self_loops ? "true" : "false";
  m["mm_mode"] = c.edges.mm_mode == MmMode::Full ? "full" : "adjacent";
  m["gcn_layers"] = std::to_string(c.gcn_layers);
  m["residual_mode"] = c.residual == ResidualMode::Self ? "self" : "literal";
  m["scorer_rank"] = std::to_string(c.scorer_rank);
  m["loss"] = c.loss == LossKind::Ranking ? "ranking" : "bce";
  {
    std::ostringstream s;
    s << c.margins.m_plus;
    m["m_plus"] = s.str();
  }
  {
    std::ostringstream s;
    s << c.margins.m_minus;
    m["m_minus"] = s.str();
  }
  m["na_mode"] = c.margins.na_mode == NaMode::Excluded ? "excluded" : "negative_only";
  return m;
}

ConfigMap to_map(const ModelConfig& model, const TrainConfig& t) {
  ConfigMap m = to_map(model);
  m["epochs"] = std::to_string(t.epochs);
  m["batch_size"] = std::to_string(t.batch_size);
  m["seed"] = std::to_string(t.seed);
  {
    std::ostringstream s;
    s << t.lr_encoder;
    m["lr_encoder"] = s.str();
  }
  {
    std::ostringstream s;
    s << t.lr_graph;
    m["lr_graph"] = s.str();
  }
  {
    std::ostringstream s;
    s << t.beta1;
    m["beta1"] = s.str();
  }
  {
    std::ostringstream s;
    s << t.beta2;
    m["beta2"] = s.str();
  }
  {
    std::ostringstream s;
    s << t.adam_eps;
    m["adam_eps"] = s.str();
  }
  m["negative_cap"] = std::to_string(t.negative_cap);
  m["patience"] = std::to_string(t.patience);
  m["checkpoint_every"] = std::to_string(t.checkpoint_every);
  m["threads"] = std::to_string(t.threads);
  m["min_count"] = std::to_string(t.min_count);
  return m;
}

std::string serialize_config(const ConfigMap& map) {
  std::ostringstream out;
  for (const auto& [k, v] : map) {
    out << k << " = " << v << '\n';
  }
  return out.str();
}

std::uint64_t config_hash(const ConfigMap& map) {
  std::string text = serialize_config(map);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace mcn
