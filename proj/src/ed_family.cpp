#include "baire/ed_family.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace baire {

FunctionPrefix prefix_of_values(const std::vector<Value>& small) {
  FunctionPrefix out;
  out.reserve(small.size());
  for (Value v : small) out.emplace_back(static_cast<unsigned long>(v));
  return out;
}

nlohmann::json prefix_to_json(const FunctionPrefix& f) {
  nlohmann::json j = nlohmann::json::array();
  for (const BigNat& v : f) {
    if (v.fits_ulong_p())
      j.push_back(static_cast<std::uint64_t>(v.get_ui()));
    else
      j.push_back(v.get_str());
  }
  return j;
}

FunctionPrefix prefix_from_json(const nlohmann::json& j) {
  FunctionPrefix out;
  for (const auto& e : j) {
    if (e.is_string())
      out.emplace_back(e.get<std::string>(), 10);
    else
      out.emplace_back(static_cast<unsigned long>(e.get<std::uint64_t>()));
  }
  return out;
}

EdStatus ed_status(const FunctionPrefix& f, const FunctionPrefix& g) {
  EdStatus s;
  std::size_t n = std::min(f.size(), g.size());
  for (std::size_t i = 0; i < n; ++i)
    if (f[i] == g[i]) {
      ++s.agreements;
      s.last_agreement = i;
    }
  return s;
}

BigNat Partition::enumerate(std::uint64_t block, const BigNat& i) const {
  BigNat v = 2 * i + 1;
  mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), block);
  return v - 1;
}

std::uint64_t Partition::block_of(const BigNat& n) const {
  BigNat m = n + 1;
  return mpz_scan1(m.get_mpz_t(), 0);
}

BigNat Partition::index_in_block(const BigNat& n) const {
  BigNat m = n + 1;
  mpz_fdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), block_of(n) + 1);
  return m;
}

Partition make_partition() { return Partition{}; }

// Level-index registry: a trie over child slots, one node per touched tree
// node, indices handed out per level in touch order.
struct AdTree::State {
  struct TrieNode {
    std::uint64_t index;
    std::map<BigNat, std::unique_ptr<TrieNode>> kids;
  };

  Partition part;
  TrieNode root{0, {}};
  std::vector<std::uint64_t> next_index;
  mutable std::mutex mu;

  TrieNode* touch(TrieNode* n, const BigNat& slot, std::size_t level) {
    auto it = n->kids.find(slot);
    if (it == n->kids.end()) {
      if (next_index.size() <= level) next_index.resize(level + 1, 0);
      auto child = std::make_unique<TrieNode>();
      child->index = next_index[level]++;
      it = n->kids.emplace(slot, std::move(child)).first;
    }
    return it->second.get();
  }
};

AdTree::AdTree() : state_(std::make_shared<State>()) {}

FunctionPrefix AdTree::branch(const FunctionPrefix& selector) const {
  std::lock_guard<std::mutex> lock(state_->mu);
  FunctionPrefix out;
  out.reserve(selector.size());
  State::TrieNode* node = &state_->root;
  for (std::size_t j = 0; j < selector.size(); ++j) {
    out.push_back(state_->part.enumerate(node->index, selector[j]));
    node = state_->touch(node, selector[j], j);
  }
  return out;
}

std::uint64_t AdTree::level_index(const FunctionPrefix& selector, std::size_t len) const {
  if (len > selector.size()) throw std::out_of_range("level_index beyond the selector");
  std::lock_guard<std::mutex> lock(state_->mu);
  State::TrieNode* node = &state_->root;
  for (std::size_t j = 0; j < len; ++j) node = state_->touch(node, selector[j], j);
  return node->index;
}

class AdTreeModel final : public TreeModel {
 public:
  explicit AdTreeModel(std::shared_ptr<AdTree::State> state) : state_(std::move(state)) {}

  bool member(const Node& t) const override {
    std::lock_guard<std::mutex> lock(state_->mu);
    AdTree::State::TrieNode* node = &state_->root;
    for (std::size_t j = 0; j < t.size(); ++j) {
      BigNat v(static_cast<unsigned long>(t[j]));
      if (state_->part.block_of(v) != node->index) return false;
      node = state_->touch(node, state_->part.index_in_block(v), j);
    }
    return true;
  }

  std::vector<Value> successors(const Node& t, std::size_t limit) const override {
    return successors_from(t, 0, limit);
  }

  std::vector<Value> successors_from(const Node& t, Value min_value,
                                     std::size_t limit) const override {
    std::lock_guard<std::mutex> lock(state_->mu);
    AdTree::State::TrieNode* node = &state_->root;
    for (std::size_t j = 0; j < t.size(); ++j) {
      BigNat v(static_cast<unsigned long>(t[j]));
      node = state_->touch(node, state_->part.index_in_block(v), j);
    }
    // Block values 2^m(2i+1)-1 for i from the least index reaching min_value.
    BigNat pow(1);
    mpz_mul_2exp(pow.get_mpz_t(), pow.get_mpz_t(), node->index);
    BigNat i(0);
    BigNat lo(static_cast<unsigned long>(min_value));
    if (lo + 1 > pow) {
      BigNat num = lo + 1 - pow;
      mpz_cdiv_q(i.get_mpz_t(), num.get_mpz_t(), BigNat(2 * pow).get_mpz_t());
    }
    std::vector<Value> out;
    out.reserve(limit);
    for (std::size_t k = 0; k < limit; ++k) {
      BigNat val = state_->part.enumerate(node->index, i + k);
      if (!val.fits_ulong_p())
        throw std::domain_error("successor value exceeds 64 bits at " + t.to_string() +
                                "; use the big-natural branch interface");
      out.push_back(static_cast<Value>(val.get_ui()));
    }
    return out;
  }

  bool claims_infinite_successors(const Node&) const override { return true; }

  std::optional<Kind> kind_claim() const override { return Kind::CompleteLaver; }

  nlohmann::json recipe() const override { return {{"recipe", "adtree"}}; }

 private:
  std::shared_ptr<AdTree::State> state_;
};

LazyTree AdTree::as_lazy_tree() const { return LazyTree(std::make_shared<AdTreeModel>(state_)); }

FunctionPrefix embed(const AdTree& tree, const FunctionPrefix& d) { return tree.branch(d); }

FunctionPrefix scale4(const FunctionPrefix& f) {
  FunctionPrefix out;
  out.reserve(f.size());
  for (const BigNat& v : f) out.push_back(v * 4);
  return out;
}

namespace {

class ResidueModel final : public TreeModel {
 public:
  ResidueModel(LazyTree base, Value r) : base_(std::move(base)), r_(r) {}

  bool member(const Node& t) const override {
    Node pre;
    return preimage(t, pre) && base_.member(pre);
  }

  std::vector<Value> successors(const Node& t, std::size_t limit) const override {
    return successors_from(t, 0, limit);
  }

  std::vector<Value> successors_from(const Node& t, Value min_value,
                                     std::size_t limit) const override {
    Node pre;
    preimage(t, pre);
    Value base_min = min_value <= r_ ? 0 : (min_value - r_ + 3) / 4;
    std::vector<Value> out = base_.successors_from(pre, base_min, limit);
    for (Value& v : out) {
      if (v > (std::numeric_limits<Value>::max() - r_) / 4)
        throw std::domain_error("residue image value exceeds 64 bits");
      v = 4 * v + r_;
    }
    return out;
  }

  bool claims_infinite_successors(const Node& t) const override {
    Node pre;
    preimage(t, pre);
    return base_.claims_infinite_successors(pre);
  }

  std::optional<Kind> kind_claim() const override {
    auto k = base_.kind_claim();
    if (!k) return std::nullopt;
    // Successor order transfers, co-finiteness in omega does not.
    if (*k == Kind::Hechler) return Kind::Laver;
    if (*k == Kind::CompleteHechler) return Kind::CompleteLaver;
    return k;
  }

  nlohmann::json recipe() const override {
    return {{"recipe", "residue"}, {"base", base_.recipe()}, {"r", r_}};
  }

 private:
  bool preimage(const Node& t, Node& out) const {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < r_ || (t[i] - r_) % 4 != 0) return false;
      out.push_back((t[i] - r_) / 4);
    }
    return true;
  }

  LazyTree base_;
  Value r_;
};

}  // namespace

LazyTree residue_embed(const LazyTree& tree, Value r) {
  if (r < 1 || r > 3) throw std::invalid_argument("residue class must be 1, 2, or 3");
  return LazyTree(std::make_shared<ResidueModel>(tree, r));
}

FunctionPrefix finite_modify(const FunctionPrefix& d, std::size_t i, const BigNat& v) {
  if (i >= d.size()) throw std::out_of_range("finite_modify index beyond the prefix");
  if (d[i] == v) throw std::domain_error("finite_modify requires a genuinely different value");
  FunctionPrefix out = d;
  out[i] = v;
  return out;
}

LazyTree tree_from_spec(const std::string& spec) {
  if (spec == "full") return full_tree();
  if (spec == "adtree") return AdTree().as_lazy_tree();
  auto starts = [&](const char* p) { return spec.rfind(p, 0) == 0; };
  auto tail_number = [&](std::size_t from) -> Value {
    std::size_t used = 0;
    Value n = std::stoull(spec.substr(from), &used);
    if (from + used != spec.size()) throw std::invalid_argument("not a tree spec: '" + spec + "'");
    return n;
  };
  try {
    if (starts("cylinder:")) return cylinder_tree(tail_number(9));
    if (starts("bounded:")) return bounded_tree(tail_number(8));
    if (starts("restrict:")) {
      std::size_t cut = spec.rfind(":(");
      if (cut == std::string::npos || cut < 9)
        throw std::invalid_argument("not a tree spec: '" + spec + "'");
      LazyTree base = tree_from_spec(spec.substr(9, cut - 9));
      return restrict_to(base, parse_node(spec.substr(cut + 1)));
    }
    if (starts("residue:")) {
      std::size_t cut = spec.rfind(':');
      if (cut == std::string::npos || cut < 8)
        throw std::invalid_argument("not a tree spec: '" + spec + "'");
      LazyTree base = tree_from_spec(spec.substr(8, cut - 8));
      return residue_embed(base, tail_number(cut + 1));
    }
  } catch (const std::domain_error&) {
    throw;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a tree spec: '" + spec + "'");
  }
  throw std::invalid_argument("not a tree spec: '" + spec + "'");
}

}  // namespace baire
