#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

namespace baire {

using Value = std::uint64_t;

// A finite sequence of naturals, i.e. a node of the full tree on Baire space.
class Node {
 public:
  Node() = default;
  explicit Node(std::vector<Value> entries) : entries_(std::move(entries)) {}
  Node(std::initializer_list<Value> entries) : entries_(entries) {}

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Value operator[](std::size_t i) const { return entries_[i]; }
  Value back() const { return entries_.back(); }
  const std::vector<Value>& entries() const { return entries_; }

  Node extended(Value v) const {
    std::vector<Value> e = entries_;
    e.push_back(v);
    return Node(std::move(e));
  }

  void push_back(Value v) { entries_.push_back(v); }
  void pop_back() { entries_.pop_back(); }

  Node prefix(std::size_t len) const {
    return Node(std::vector<Value>(entries_.begin(), entries_.begin() + len));
  }

  Node concat(const Node& tail) const {
    std::vector<Value> e = entries_;
    e.insert(e.end(), tail.entries_.begin(), tail.entries_.end());
    return Node(std::move(e));
  }

  // Drops the first `len` entries; caller guarantees len <= size().
  Node suffix_from(std::size_t len) const {
    return Node(std::vector<Value>(entries_.begin() + len, entries_.end()));
  }

  bool prefix_of(const Node& other) const {
    if (size() > other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (entries_[i] != other.entries_[i]) return false;
    return true;
  }

  bool comparable_with(const Node& other) const {
    return prefix_of(other) || other.prefix_of(*this);
  }

  bool operator==(const Node& other) const { return entries_ == other.entries_; }
  bool operator!=(const Node& other) const { return !(*this == other); }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(entries_[i]);
    }
    s += ")";
    return s;
  }

 private:
  std::vector<Value> entries_;
};

// Canonical order used when listing tree nodes: by length, then entrywise.
inline bool node_less(const Node& a, const Node& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

// Parses the to_string form: "()", "(3)", "(1,2,0)". Throws std::invalid_argument.
inline Node parse_node(const std::string& s) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')')
    throw std::invalid_argument("not a node literal: '" + s + "'");
  std::vector<Value> entries;
  std::size_t pos = 1;
  while (pos < s.size() - 1) {
    std::size_t used = 0;
    unsigned long long v;
    try {
      v = std::stoull(s.substr(pos, s.size() - 1 - pos), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a node literal: '" + s + "'");
    }
    entries.push_back(static_cast<Value>(v));
    pos += used;
    if (pos < s.size() - 1) {
      if (s[pos] != ',') throw std::invalid_argument("not a node literal: '" + s + "'");
      ++pos;
      if (pos == s.size() - 1) throw std::invalid_argument("not a node literal: '" + s + "'");
    }
  }
  return Node(std::move(entries));
}

inline void to_json(nlohmann::json& j, const Node& n) { j = n.entries(); }

inline void from_json(const nlohmann::json& j, Node& n) {
  n = Node(j.get<std::vector<Value>>());
}

}  // namespace baire
