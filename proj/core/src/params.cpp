#include "mcn/params.hpp"

#include <cstring>
#include <fstream>

namespace mcn {

Mat& ParamSet::add(const std::string& name, ParamGroup group, Mat value) {
  if (has(name)) throw ValidationError("ParamSet: duplicate parameter '" + name + "'");
  Entry e;
  e.name = name;
  e.group = group;
  e.value = std::move(value);
  e.adam_m = Mat::Zero(e.value.rows(), e.value.cols());
  e.adam_v = Mat::Zero(e.value.rows(), e.value.cols());
  entries_.push_back(std::move(e));
  index_[name] = entries_.size() - 1;
  return entries_.back().value;
}

Mat& ParamSet::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("ParamSet: unknown parameter '" + name + "'");
  return entries_[it->second].value;
}

const Mat& ParamSet::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("ParamSet: unknown parameter '" + name + "'");
  return entries_[it->second].value;
}

namespace {

constexpr char kMagic[8] = {'M', 'C', 'N', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

enum SectionType : std::uint8_t { kTensor = 0, kStringList = 1, kText = 2 };

void write_u8(std::ostream& out, std::uint8_t v) {
  out.write(reinterpret_cast<const char*>(&v), 1);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

void write_str(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint8_t read_u8(std::istream& in) {
  std::uint8_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 1);
  if (!in) throw ParseError("checkpoint: truncated file");
  return v;
}

std::uint32_t read_u32(std::istream& in) {
  char buf[4];
  in.read(buf, 4);
  if (!in) throw ParseError("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  if (!in) throw ParseError("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

double read_f64(std::istream& in) {
  std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::string read_str(std::istream& in) {
  std::uint32_t len = read_u32(in);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw ParseError("checkpoint: truncated string");
  return s;
}

void write_string_list(std::ostream& out, const std::string& name,
                       const std::vector<std::string>& items) {
  write_u8(out, kStringList);
  write_str(out, name);
  write_u32(out, static_cast<std::uint32_t>(items.size()));
  for (const auto& s : items) write_str(out, s);
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("save_checkpoint: cannot write " + path);
  out.write(kMagic, 8);
  write_u32(out, kVersion);
  write_u64(out, config_hash(ckpt.config));

  std::uint32_t n_sections = 4 + static_cast<std::uint32_t>(ckpt.params.size());
  write_u32(out, n_sections);

  write_u8(out, kText);
  write_str(out, "config");
  write_str(out, serialize_config(ckpt.config));

  write_string_list(out, "vocab", ckpt.vocab_tokens);
  write_string_list(out, "relations", ckpt.relation_names);
  write_string_list(out, "etypes", ckpt.etype_names);

  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    const ParamSet::Entry& e = ckpt.params.entry(i);
    write_u8(out, kTensor);
    write_str(out, e.name);
    write_u8(out, e.group == ParamGroup::Encoder ? 0 : 1);
    write_u32(out, static_cast<std::uint32_t>(e.value.rows()));
    write_u32(out, static_cast<std::uint32_t>(e.value.cols()));
    for (Eigen::Index r = 0; r < e.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < e.value.cols(); ++c) {
        write_f64(out, e.value(r, c));
      }
    }
  }
  if (!out) throw ValidationError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("load_checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw ParseError("load_checkpoint: " + path + " is not a checkpoint file");
  }
  std::uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw ParseError("load_checkpoint: unsupported version " + std::to_string(version));
  }
  std::uint64_t stored_hash = read_u64(in);
  std::uint32_t n_sections = read_u32(in);

  Checkpoint ckpt;
  for (std::uint32_t s = 0; s < n_sections; ++s) {
    std::uint8_t type = read_u8(in);
    std::string name = read_str(in);
    if (type == kText) {
      std::string text = read_str(in);
      if (name == "config") ckpt.config = parse_config_text(text);
    } else if (type == kStringList) {
      std::uint32_t count = read_u32(in);
      std::vector<std::string> items;
      items.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) items.push_back(read_str(in));
      if (name == "vocab") {
        ckpt.vocab_tokens = std::move(items);
      } else if (name == "relations") {
        ckpt.relation_names = std::move(items);
      } else if (name == "etypes") {
        ckpt.etype_names = std::move(items);
      }
    } else if (type == kTensor) {
      std::uint8_t group = read_u8(in);
      std::uint32_t rows = read_u32(in);
      std::uint32_t cols = read_u32(in);
      Mat m(rows, cols);
      for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = read_f64(in);
      }
      ckpt.params.add(name, group == 0 ? ParamGroup::Encoder : ParamGroup::Graph, std::move(m));
    } else {
      throw ParseError("load_checkpoint: unknown section type");
    }
  }
  if (config_hash(ckpt.config) != stored_hash) {
    throw ParseError("load_checkpoint: config hash mismatch (corrupt file?)");
  }
  return ckpt;
}

}  // namespace mcn
