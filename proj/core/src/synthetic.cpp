#include "mcn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace mcn {

namespace {

struct ChainPlan {
  bool two_hop = false;
  int rule = 0;        // index into spec.rules (two-hop)
  int atomic_rel = 0;  // atomic relation id (single-fact)
};

void validate(const SyntheticSpec& spec) {
  if (spec.num_docs < 1) throw ValidationError("gen_synthetic: num_docs must be >= 1");
  if (spec.entities_per_doc < 2) {
    throw ValidationError("gen_synthetic: entities_per_doc must be >= 2");
  }
  if (spec.atomic_relations < 1) {
    throw ValidationError("gen_synthetic: need at least one atomic relation");
  }
  if (spec.two_hop_fraction < 0.0 || spec.two_hop_fraction > 1.0) {
    throw ValidationError("gen_synthetic: two_hop_fraction must be in [0, 1]");
  }
  if (spec.two_hop_fraction > 0.0 && spec.rules.empty()) {
    throw ValidationError("gen_synthetic: two_hop_fraction > 0 requires composition rules");
  }
  if (spec.sentence_length < 5) {
    throw ValidationError("gen_synthetic: sentence_length must be >= 5");
  }
  if (spec.evidence_gap < 1) throw ValidationError("gen_synthetic: evidence_gap must be >= 1");
  if (spec.chain_stride < spec.evidence_gap + 1) {
    throw ValidationError("gen_synthetic: chain_stride must exceed evidence_gap");
  }
  int chains = spec.chains_per_doc();
  int needed = (chains - 1) * spec.chain_stride + spec.evidence_gap + 1;
  if (spec.sentences_per_doc < needed) {
    throw ValidationError("gen_synthetic: sentences_per_doc " +
                          std::to_string(spec.sentences_per_doc) + " too small; need >= " +
                          std::to_string(needed));
  }
  if (spec.vocab_size < spec.entities_per_doc + 4) {
    throw ValidationError("gen_synthetic: vocab_size too small for distinct entity names");
  }
  std::map<std::pair<int, int>, int> seen;
  for (const CompositionRule& r : spec.rules) {
    if (r.left < 0 || r.left >= spec.atomic_relations || r.right < 0 ||
        r.right >= spec.atomic_relations) {
      throw ValidationError("gen_synthetic: composition rule references unknown atomic relation");
    }
    if (r.composed < spec.atomic_relations) {
      throw ValidationError("gen_synthetic: composed relation id must be above the atomic range");
    }
    auto [it, inserted] = seen.emplace(std::make_pair(r.left, r.right), r.composed);
    if (!inserted && it->second != r.composed) {
      throw ValidationError("gen_synthetic: inconsistent composition rules for pair (" +
                            std::to_string(r.left) + ", " + std::to_string(r.right) + ")");
    }
  }
}

Entity make_entity(int idx, const std::string& name, int sent_id, int pos) {
  Entity e;
  Mention m;
  m.entity_idx = idx;
  m.sent_id = sent_id;
  m.start = pos;
  m.end = pos + 1;
  m.surface = {name};
  m.type = "ENT";
  e.mentions.push_back(std::move(m));
  e.etype = "ENT";
  e.canonical_names.insert(name);
  return e;
}

}  // namespace

int SyntheticSpec::chains_per_doc() const {
  int per_chain = two_hop_fraction > 0.0 ? 3 : 2;
  return std::max(1, entities_per_doc / per_chain);
}

int SyntheticSpec::relation_count() const {
  int r = atomic_relations;
  for (const CompositionRule& rule : rules) r = std::max(r, rule.composed + 1);
  return r;
}

RelationTable synthetic_relation_table(const SyntheticSpec& spec) {
  std::vector<std::string> names;
  for (int i = 0; i < spec.relation_count(); ++i) names.push_back("R" + std::to_string(i));
  return RelationTable(std::move(names));
}

std::vector<Document> gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate(spec);
  int chains = spec.chains_per_doc();
  int total_slots = spec.num_docs * chains;
  int two_hop_slots =
      static_cast<int>(std::ceil(spec.two_hop_fraction * static_cast<double>(total_slots)));

  // Corpus-level assignment of which chain slots carry a two-hop label, so
  // the two-hop count over the corpus is exact.
  std::vector<int> slot_order(static_cast<std::size_t>(total_slots));
  for (int i = 0; i < total_slots; ++i) slot_order[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 assign_rng(mix_seed(seed, 0x5107));
  std::shuffle(slot_order.begin(), slot_order.end(), assign_rng);
  std::vector<bool> slot_two_hop(static_cast<std::size_t>(total_slots), false);
  for (int i = 0; i < two_hop_slots; ++i) {
    slot_two_hop[static_cast<std::size_t>(slot_order[static_cast<std::size_t>(i)])] = true;
  }

  // Token pools. Relation words are their own tokens outside vocab_size.
  int name_pool = std::max(spec.entities_per_doc + 2, spec.vocab_size / 2);
  int filler_pool = std::max(2, spec.vocab_size - name_pool);
  auto name_token = [](int i) { return "n" + std::to_string(i); };
  auto filler_token = [](int i) { return "f" + std::to_string(i); };
  auto rel_word = [](int r) { return "rw" + std::to_string(r); };

  std::vector<Document> docs;
  docs.reserve(static_cast<std::size_t>(spec.num_docs));

  for (int di = 0; di < spec.num_docs; ++di) {
    std::mt19937_64 rng(mix_seed(seed, 0xd0c5 + static_cast<std::uint64_t>(di)));
    Document doc;
    doc.doc_id = "synth-" + std::to_string(seed) + "-" + std::to_string(di);

    // filler background
    std::uniform_int_distribution<int> pick_filler(0, filler_pool - 1);
    doc.sentences.assign(static_cast<std::size_t>(spec.sentences_per_doc), {});
    for (auto& sent : doc.sentences) {
      sent.resize(static_cast<std::size_t>(spec.sentence_length));
      for (auto& tok : sent) tok = filler_token(pick_filler(rng));
    }

    // distinct entity names for this document
    std::vector<int> name_ids(static_cast<std::size_t>(name_pool));
    for (int i = 0; i < name_pool; ++i) name_ids[static_cast<std::size_t>(i)] = i;
    std::shuffle(name_ids.begin(), name_ids.end(), rng);
    std::size_t next_name = 0;
    auto fresh_name = [&]() {
      if (next_name >= name_ids.size()) {
        throw ValidationError("gen_synthetic: name pool exhausted");
      }
      return name_token(name_ids[next_name++]);
    };
    std::string shared_mid = spec.shared_intermediate_names ? fresh_name() : std::string();

    std::vector<ChainPlan> plans(static_cast<std::size_t>(chains));
    for (int c = 0; c < chains; ++c) {
      ChainPlan& plan = plans[static_cast<std::size_t>(c)];
      plan.two_hop = slot_two_hop[static_cast<std::size_t>(di * chains + c)];
      if (plan.two_hop) {
        std::uniform_int_distribution<int> pick_rule(0,
                                                     static_cast<int>(spec.rules.size()) - 1);
        plan.rule = pick_rule(rng);
      } else {
        std::uniform_int_distribution<int> pick_rel(0, spec.atomic_relations - 1);
        plan.atomic_rel = pick_rel(rng);
      }
    }

    // Fact tokens occupy [offset, offset+2]; plants go to the sentence tail.
    int max_offset =
        std::max(0, spec.sentence_length - 3 - std::max(1, spec.intermediate_noise_mentions));
    std::uniform_int_distribution<int> pick_offset(0, std::min(2, max_offset));

    struct MidInfo {
      int entity_idx = -1;
      std::string name;
    };
    std::vector<MidInfo> mids(static_cast<std::size_t>(chains));
    std::vector<std::vector<int>> fact_sentences(static_cast<std::size_t>(chains));

    for (int c = 0; c < chains; ++c) {
      const ChainPlan& plan = plans[static_cast<std::size_t>(c)];
      int sa = c * spec.chain_stride;
      int base_idx = static_cast<int>(doc.entities.size());
      if (plan.two_hop) {
        int sb = sa + spec.evidence_gap;
        const CompositionRule& rule = spec.rules[static_cast<std::size_t>(plan.rule)];
        std::string hname = fresh_name();
        std::string mname = spec.shared_intermediate_names ? shared_mid : fresh_name();
        std::string tname = fresh_name();

        int oa = pick_offset(rng);
        auto& sent_a = doc.sentences[static_cast<std::size_t>(sa)];
        sent_a[static_cast<std::size_t>(oa)] = hname;
        sent_a[static_cast<std::size_t>(oa + 1)] = rel_word(rule.left);
        sent_a[static_cast<std::size_t>(oa + 2)] = mname;

        int ob = pick_offset(rng);
        auto& sent_b = doc.sentences[static_cast<std::size_t>(sb)];
        sent_b[static_cast<std::size_t>(ob)] = mname;
        sent_b[static_cast<std::size_t>(ob + 1)] = rel_word(rule.right);
        sent_b[static_cast<std::size_t>(ob + 2)] = tname;

        doc.entities.push_back(make_entity(base_idx, hname, sa, oa));
        Entity mid = make_entity(base_idx + 1, mname, sa, oa + 2);
        Mention second = mid.mentions[0];
        second.sent_id = sb;
        second.start = ob;
        second.end = ob + 1;
        mid.mentions.push_back(second);
        doc.entities.push_back(std::move(mid));
        doc.entities.push_back(make_entity(base_idx + 2, tname, sb, ob + 2));

        RelationLabel label;
        label.head = base_idx;
        label.tail = base_idx + 2;
        label.relation = rule.composed;
        label.evidence = {sa, sb};
        doc.labels.push_back(std::move(label));

        mids[static_cast<std::size_t>(c)] = {base_idx + 1, mname};
        fact_sentences[static_cast<std::size_t>(c)] = {sa, sb};
      } else {
        std::string hname = fresh_name();
        std::string tname = fresh_name();
        int oa = pick_offset(rng);
        auto& sent_a = doc.sentences[static_cast<std::size_t>(sa)];
        sent_a[static_cast<std::size_t>(oa)] = hname;
        sent_a[static_cast<std::size_t>(oa + 1)] = rel_word(plan.atomic_rel);
        sent_a[static_cast<std::size_t>(oa + 2)] = tname;

        doc.entities.push_back(make_entity(base_idx, hname, sa, oa));
        doc.entities.push_back(make_entity(base_idx + 1, tname, sa, oa + 2));

        RelationLabel label;
        label.head = base_idx;
        label.tail = base_idx + 1;
        label.relation = plan.atomic_rel;
        label.evidence = {sa};
        doc.labels.push_back(std::move(label));

        fact_sentences[static_cast<std::size_t>(c)] = {sa};
      }
    }

    // Plant extra intermediate mentions into other chains' fact sentences so
    // an intermediate's sentence links stop identifying its own chain.
    if (spec.intermediate_noise_mentions > 0 && chains > 1) {
      std::map<int, int> planted_in_sentence;
      for (int c = 0; c < chains; ++c) {
        const MidInfo& mid = mids[static_cast<std::size_t>(c)];
        if (mid.entity_idx < 0) continue;  // single-fact chain, no intermediate
        for (int p = 0; p < spec.intermediate_noise_mentions; ++p) {
          int other = (c + 1 + p) % chains;
          if (other == c) continue;
          const auto& targets = fact_sentences[static_cast<std::size_t>(other)];
          int sid = targets[static_cast<std::size_t>(p % targets.size())];
          int& used = planted_in_sentence[sid];
          int pos = spec.sentence_length - 1 - used;
          if (pos < 4) continue;  // sentence tail exhausted
          ++used;
          doc.sentences[static_cast<std::size_t>(sid)][static_cast<std::size_t>(pos)] = mid.name;
          Mention m;
          m.entity_idx = mid.entity_idx;
          m.sent_id = sid;
          m.start = pos;
          m.end = pos + 1;
          m.surface = {mid.name};
          m.type = "ENT";
          doc.entities[static_cast<std::size_t>(mid.entity_idx)].mentions.push_back(std::move(m));
        }
      }
    }

    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<std::pair<std::size_t, RelationLabel>> drop_labels(std::vector<Document>& docs,
                                                               double fraction,
                                                               std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw ValidationError("drop_labels: fraction must be in [0, 1]");
  }
  std::vector<std::pair<std::size_t, std::size_t>> slots;  // (doc, label)
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (std::size_t l = 0; l < docs[d].labels.size(); ++l) slots.emplace_back(d, l);
  }
  std::mt19937_64 rng(mix_seed(seed, 0xd709));
  std::shuffle(slots.begin(), slots.end(), rng);
  std::size_t n_drop = static_cast<std::size_t>(fraction * static_cast<double>(slots.size()));
  slots.resize(n_drop);

  // Remove by (doc, label index), highest index first so indices stay valid.
  std::sort(slots.begin(), slots.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });
  std::vector<std::pair<std::size_t, RelationLabel>> removed;
  removed.reserve(n_drop);
  for (const auto& [d, l] : slots) {
    removed.emplace_back(d, docs[d].labels[l]);
    docs[d].labels.erase(docs[d].labels.begin() + static_cast<std::ptrdiff_t>(l));
  }
  return removed;
}

}  // namespace mcn
