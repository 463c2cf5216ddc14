#include "baire/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace baire {

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::Sacks: return "sacks";
    case Kind::Miller: return "miller";
    case Kind::Laver: return "laver";
    case Kind::CompleteLaver: return "complete-laver";
    case Kind::Hechler: return "hechler";
    case Kind::CompleteHechler: return "complete-hechler";
  }
  return "?";
}

std::optional<Kind> kind_from_name(const std::string& name) {
  for (Kind k : {Kind::Sacks, Kind::Miller, Kind::Laver, Kind::CompleteLaver, Kind::Hechler,
                 Kind::CompleteHechler})
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

std::string verdict_status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::ConfirmedAtDepth: return "confirmed-at-depth";
    case VerdictStatus::Refuted: return "refuted";
    case VerdictStatus::Unknown: return "unknown";
  }
  return "?";
}

std::vector<Value> LazyTree::successors(const Node& t, std::size_t limit) const {
  if (!model_->member(t)) throw std::domain_error("successors of a non-member node " + t.to_string());
  return model_->successors(t, limit);
}

std::vector<Value> LazyTree::successors_from(const Node& t, Value min_value,
                                             std::size_t limit) const {
  if (!model_->member(t)) throw std::domain_error("successors of a non-member node " + t.to_string());
  return model_->successors_from(t, min_value, limit);
}

FiniteTreeApprox::FiniteTreeApprox(std::vector<Node> nodes, std::size_t depth, std::size_t width,
                                   nlohmann::json provenance)
    : nodes_(std::move(nodes)), depth_(depth), width_(width), provenance_(std::move(provenance)) {
  std::sort(nodes_.begin(), nodes_.end(), node_less);
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
}

bool FiniteTreeApprox::contains(const Node& t) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), t, node_less);
}

void to_json(nlohmann::json& j, const FiniteTreeApprox& f) {
  j = nlohmann::json{{"depth", f.depth()}, {"width", f.width()}, {"nodes", f.nodes()}};
  if (!f.provenance().is_null()) j["provenance"] = f.provenance();
}

void from_json(const nlohmann::json& j, FiniteTreeApprox& f) {
  f = FiniteTreeApprox(j.at("nodes").get<std::vector<Node>>(), j.at("depth").get<std::size_t>(),
                       j.at("width").get<std::size_t>(), j.value("provenance", nlohmann::json()));
}

std::string SplitReport::to_string() const {
  if (omega_witnessed) return "omega-split-witnessed(" + std::to_string(count) + ")";
  std::string s = "finite-split(" + std::to_string(count) + ")";
  if (count < 2) s += ", non-split";
  return s;
}

StemResult stem(const LazyTree& tree, std::size_t depth_budget) {
  if (depth_budget < 1) throw std::invalid_argument("stem search needs a positive budget");
  StemResult r;
  Node cur;
  while (r.probed < depth_budget) {
    std::vector<Value> ss = tree.successors(cur, 2);
    ++r.probed;
    if (ss.size() == 1) {
      cur.push_back(ss[0]);
      continue;
    }
    r.stem = cur;  // >= 2 successors split here; 0 successors means nothing splits below
    return r;
  }
  return r;
}

SplitReport split_kind(const LazyTree& tree, const Node& t, std::size_t probe) {
  if (probe < 2) throw std::invalid_argument("split probe must be at least 2");
  SplitReport r;
  r.count = tree.successors(t, probe).size();
  r.omega_witnessed = r.count >= probe;
  return r;
}

FiniteTreeApprox truncate(const LazyTree& tree, std::size_t depth, std::size_t width) {
  if (width < 1) throw std::invalid_argument("truncation width must be positive");
  std::vector<Node> nodes{Node{}};
  std::size_t level_begin = 0;
  for (std::size_t d = 0; d < depth; ++d) {
    std::size_t level_end = nodes.size();
    for (std::size_t i = level_begin; i < level_end; ++i)
      for (Value v : tree.successors(nodes[i], width)) nodes.push_back(nodes[i].extended(v));
    level_begin = level_end;
  }
  nlohmann::json prov{{"recipe", tree.recipe()}, {"depth", depth}, {"width", width}};
  return FiniteTreeApprox(std::move(nodes), depth, width, std::move(prov));
}

namespace {

// Per-node observations shared by the kind checks below.
struct WindowProbe {
  std::vector<Node> nodes;               // sorted length-then-lex
  std::vector<std::vector<Value>> obs;   // first `width` successor values
  std::vector<bool> exhausted;           // stream ended below `width`: successor set proven finite
  std::vector<bool> claimed;             // model asserts infinitely many successors
  std::vector<bool> masked;              // model declares a co-finite successor mask
  std::size_t width = 0;

  std::size_t index_of(const Node& t) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), t, node_less);
    return static_cast<std::size_t>(it - nodes.begin());
  }

  template <typename F>
  bool all_children(std::size_t i, F pred) const {
    for (Value v : obs[i]) {
      Node child = nodes[i].extended(v);
      std::size_t j = index_of(child);
      if (j >= nodes.size() || !(nodes[j] == child)) continue;  // frontier: child not windowed
      if (!pred(j)) return false;
    }
    return true;
  }

  template <typename F>
  bool any_child(std::size_t i, F pred) const {
    return !all_children(i, [&](std::size_t j) { return !pred(j); });
  }
};

WindowProbe probe_window(const LazyTree& tree, std::size_t depth, std::size_t width) {
  WindowProbe w;
  w.width = width;
  w.nodes = truncate(tree, depth, width).nodes();
  w.obs.reserve(w.nodes.size());
  for (const Node& t : w.nodes) {
    w.obs.push_back(tree.successors(t, width));
    w.exhausted.push_back(w.obs.back().size() < width);
    w.claimed.push_back(tree.claims_infinite_successors(t));
    w.masked.push_back(tree.cofinite_exclusions(t).has_value());
  }
  return w;
}

}  // namespace

std::vector<KindVerdict> classify(const LazyTree& tree, std::size_t depth, std::size_t width) {
  if (depth < 1 || width < 2) throw std::invalid_argument("classify needs depth >= 1, width >= 2");
  WindowProbe w = probe_window(tree, depth, width);
  const std::size_t n = w.nodes.size();

  // Extension-quantified clauses, evaluated bottom-up (children follow their
  // parents in the sorted order, so a reverse sweep sees children first).
  // good: some visible extension (or the node itself) meets the split bar.
  // bad: every visible extension has a provably finite, unclaimed stream.
  std::vector<bool> good2(n), goodw(n), bad2(n), badw(n);
  for (std::size_t i = n; i-- > 0;) {
    bool conf2 = w.claimed[i] || w.obs[i].size() >= 2;
    bool confw = w.claimed[i] || w.obs[i].size() >= width;
    bool dead = w.exhausted[i] && !w.claimed[i];
    good2[i] = conf2 || w.any_child(i, [&](std::size_t j) { return good2[j]; });
    goodw[i] = confw || w.any_child(i, [&](std::size_t j) { return goodw[j]; });
    bad2[i] = dead && w.obs[i].size() < 2 && w.all_children(i, [&](std::size_t j) { return bad2[j]; });
    badw[i] = dead && w.all_children(i, [&](std::size_t j) { return badw[j]; });
  }

  auto extension_verdict = [&](Kind k, const std::vector<bool>& good,
                               const std::vector<bool>& bad) {
    KindVerdict v{k, VerdictStatus::Unknown, std::nullopt};
    for (std::size_t i = 0; i < n; ++i)
      if (bad[i]) {
        v.status = VerdictStatus::Refuted;
        v.witness = w.nodes[i];
        return v;
      }
    if (std::all_of(good.begin(), good.end(), [](bool b) { return b; }))
      v.status = VerdictStatus::ConfirmedAtDepth;
    return v;
  };

  StemResult sr = stem(tree, depth + 1);

  // Stem-relative clauses: judged on the window nodes extending the stem.
  // A refutation needs an exhausted enumeration, which proves the successor
  // set finite; confirmation of infinitude rests on claims or full-width
  // observation, and co-finiteness only on declared masks.
  auto stem_verdict = [&](Kind k, bool hechler) {
    KindVerdict v{k, VerdictStatus::Unknown, std::nullopt};
    if (!sr.stem) return v;
    const Node& s = *sr.stem;
    bool all_confirm = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!s.prefix_of(w.nodes[i])) continue;
      bool refutes = hechler ? w.exhausted[i] : (w.exhausted[i] && !w.claimed[i]);
      if (refutes) {
        v.status = VerdictStatus::Refuted;
        v.witness = w.nodes[i];
        return v;
      }
      bool confirms = hechler ? w.masked[i] : (w.claimed[i] || w.obs[i].size() >= width);
      all_confirm = all_confirm && confirms;
    }
    if (all_confirm) {
      v.status = VerdictStatus::ConfirmedAtDepth;
      v.witness = s;
    }
    return v;
  };

  auto complete_verdict = [&](Kind k, const KindVerdict& plain) {
    KindVerdict v{k, VerdictStatus::Unknown, std::nullopt};
    if (!sr.stem) return v;
    if (!sr.stem->empty()) {
      // The stem walk proved a singleton successor set at the root, which
      // already violates the complete clause there.
      v.status = VerdictStatus::Refuted;
      v.witness = Node{};
      return v;
    }
    v.status = plain.status;
    v.witness = plain.witness;
    return v;
  };

  KindVerdict laver = stem_verdict(Kind::Laver, false);
  KindVerdict hechler = stem_verdict(Kind::Hechler, true);
  return {
      extension_verdict(Kind::Sacks, good2, bad2),
      extension_verdict(Kind::Miller, goodw, badw),
      laver,
      complete_verdict(Kind::CompleteLaver, laver),
      hechler,
      complete_verdict(Kind::CompleteHechler, hechler),
  };
}

namespace {

Kind demote_complete(Kind k) {
  if (k == Kind::CompleteLaver) return Kind::Laver;
  if (k == Kind::CompleteHechler) return Kind::Hechler;
  return k;
}

Kind promote_complete(Kind k) {
  if (k == Kind::Laver) return Kind::CompleteLaver;
  if (k == Kind::Hechler) return Kind::CompleteHechler;
  return k;
}

class RestrictModel final : public TreeModel {
 public:
  RestrictModel(LazyTree base, Node pivot) : base_(std::move(base)), pivot_(std::move(pivot)) {}

  bool member(const Node& t) const override {
    return t.comparable_with(pivot_) && base_.member(t);
  }

  std::vector<Value> successors(const Node& t, std::size_t limit) const override {
    if (t.size() < pivot_.size()) return limit ? std::vector<Value>{pivot_[t.size()]} : std::vector<Value>{};
    return base_.successors(t, limit);
  }

  std::vector<Value> successors_from(const Node& t, Value min_value,
                                     std::size_t limit) const override {
    if (t.size() < pivot_.size()) {
      Value v = pivot_[t.size()];
      if (limit && v >= min_value) return {v};
      return {};
    }
    return base_.successors_from(t, min_value, limit);
  }

  bool claims_infinite_successors(const Node& t) const override {
    return t.size() >= pivot_.size() && base_.claims_infinite_successors(t);
  }

  std::optional<std::vector<Value>> cofinite_exclusions(const Node& t) const override {
    if (t.size() < pivot_.size()) return std::nullopt;
    return base_.cofinite_exclusions(t);
  }

  std::optional<Kind> kind_claim() const override {
    if (auto k = base_.kind_claim()) return demote_complete(*k);
    return std::nullopt;
  }

  nlohmann::json recipe() const override {
    return {{"recipe", "restrict"}, {"base", base_.recipe()}, {"node", pivot_}};
  }

 private:
  LazyTree base_;
  Node pivot_;
};

class StemTrimModel final : public TreeModel {
 public:
  StemTrimModel(LazyTree base, Node stem) : base_(std::move(base)), stem_(std::move(stem)) {}

  bool member(const Node& t) const override { return base_.member(stem_.concat(t)); }

  std::vector<Value> successors(const Node& t, std::size_t limit) const override {
    return base_.successors(stem_.concat(t), limit);
  }

  std::vector<Value> successors_from(const Node& t, Value min_value,
                                     std::size_t limit) const override {
    return base_.successors_from(stem_.concat(t), min_value, limit);
  }

  bool claims_infinite_successors(const Node& t) const override {
    return base_.claims_infinite_successors(stem_.concat(t));
  }

  std::optional<std::vector<Value>> cofinite_exclusions(const Node& t) const override {
    return base_.cofinite_exclusions(stem_.concat(t));
  }

  std::optional<Kind> kind_claim() const override {
    if (auto k = base_.kind_claim()) return promote_complete(*k);
    return std::nullopt;
  }

  nlohmann::json recipe() const override {
    return {{"recipe", "stem-trim"}, {"base", base_.recipe()}, {"stem", stem_}};
  }

 private:
  LazyTree base_;
  Node stem_;
};

class FullTreeModel final : public TreeModel {
 public:
  bool member(const Node&) const override { return true; }

  std::vector<Value> successors(const Node&, std::size_t limit) const override {
    std::vector<Value> out(limit);
    for (std::size_t i = 0; i < limit; ++i) out[i] = i;
    return out;
  }

  std::vector<Value> successors_from(const Node&, Value min_value,
                                     std::size_t limit) const override {
    std::vector<Value> out(limit);
    for (std::size_t i = 0; i < limit; ++i) out[i] = min_value + i;
    return out;
  }

  bool claims_infinite_successors(const Node&) const override { return true; }

  std::optional<std::vector<Value>> cofinite_exclusions(const Node&) const override {
    return std::vector<Value>{};
  }

  std::optional<Kind> kind_claim() const override { return Kind::CompleteHechler; }

  nlohmann::json recipe() const override { return {{"recipe", "full"}}; }
};

class CylinderModel final : public TreeModel {
 public:
  explicit CylinderModel(Value n) : n_(n) {}

  bool member(const Node& t) const override { return t.empty() || t[0] == n_; }

  std::vector<Value> successors(const Node& t, std::size_t limit) const override {
    if (t.empty()) return limit ? std::vector<Value>{n_} : std::vector<Value>{};
    std::vector<Value> out(limit);
    for (std::size_t i = 0; i < limit; ++i) out[i] = i;
    return out;
  }

  std::vector<Value> successors_from(const Node& t, Value min_value,
                                     std::size_t limit) const override {
    if (t.empty()) {
      if (limit && n_ >= min_value) return {n_};
      return {};
    }
    std::vector<Value> out(limit);
    for (std::size_t i = 0; i < limit; ++i) out[i] = min_value + i;
    return out;
  }

  bool claims_infinite_successors(const Node& t) const override { return !t.empty(); }

  std::optional<Kind> kind_claim() const override { return Kind::Laver; }

  nlohmann::json recipe() const override { return {{"recipe", "cylinder"}, {"n", n_}}; }

 private:
  Value n_;
};

class BoundedTreeModel final : public TreeModel {
 public:
  explicit BoundedTreeModel(Value branching) : branching_(branching) {}

  bool member(const Node& t) const override {
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= branching_) return false;
    return true;
  }

  std::vector<Value> successors(const Node&, std::size_t limit) const override {
    std::vector<Value> out;
    for (Value v = 0; v < branching_ && out.size() < limit; ++v) out.push_back(v);
    return out;
  }

  std::vector<Value> successors_from(const Node&, Value min_value,
                                     std::size_t limit) const override {
    std::vector<Value> out;
    for (Value v = min_value; v < branching_ && out.size() < limit; ++v) out.push_back(v);
    return out;
  }

  std::optional<Kind> kind_claim() const override {
    if (branching_ >= 2) return Kind::Sacks;
    return std::nullopt;
  }

  nlohmann::json recipe() const override {
    return {{"recipe", "bounded"}, {"branching", branching_}};
  }

 private:
  Value branching_;
};

}  // namespace

LazyTree restrict_to(const LazyTree& tree, const Node& t) {
  if (!tree.member(t)) throw std::domain_error("restriction to a non-member node " + t.to_string());
  if (t.empty()) return tree;
  return LazyTree(std::make_shared<RestrictModel>(tree, t));
}

LazyTree stem_trim(const LazyTree& tree, std::size_t stem_budget) {
  StemResult sr = stem(tree, stem_budget);
  if (!sr.stem)
    throw BudgetExhausted("stem not located within " + std::to_string(stem_budget) + " probes");
  if (sr.stem->empty()) return tree;
  return LazyTree(std::make_shared<StemTrimModel>(tree, *sr.stem));
}

std::vector<Node> minimal_split_extensions(const LazyTree& tree, const Node& t, std::size_t depth,
                                           std::size_t width, std::size_t split_probe) {
  std::vector<Node> out;
  // Depth-first in successor order; a qualifying node hides its extensions.
  std::vector<std::pair<Node, std::size_t>> stack{{t, 0}};
  while (!stack.empty()) {
    auto [cur, d] = stack.back();
    stack.pop_back();
    if (tree.successors(cur, split_probe).size() >= split_probe) {
      out.push_back(cur);
      continue;
    }
    if (d == depth) continue;
    std::vector<Value> vs = tree.successors(cur, width);
    for (std::size_t i = vs.size(); i-- > 0;) stack.emplace_back(cur.extended(vs[i]), d + 1);
  }
  std::sort(out.begin(), out.end(), node_less);
  return out;
}

LazyTree full_tree() { return LazyTree(std::make_shared<FullTreeModel>()); }

LazyTree cylinder_tree(Value n) { return LazyTree(std::make_shared<CylinderModel>(n)); }

LazyTree bounded_tree(Value branching) {
  return LazyTree(std::make_shared<BoundedTreeModel>(branching));
}

}  // namespace baire
