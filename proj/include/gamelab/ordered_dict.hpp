#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gamelab {

// String-keyed map that preserves insertion order. Config semantics depend on
// declaration order (personality permutations, strategy presentation), so
// std::map is not an option here.
template <class V>
class OrderedDict {
 public:
  using value_type = std::pair<std::string, V>;
  using const_iterator = typename std::vector<value_type>::const_iterator;

  OrderedDict() = default;
  OrderedDict(std::initializer_list<value_type> init) : items_(init) {}

  bool contains(const std::string& key) const { return find(key) != nullptr; }

  const V* find(const std::string& key) const {
    auto it = std::find_if(items_.begin(), items_.end(),
                           [&](const value_type& p) { return p.first == key; });
    return it == items_.end() ? nullptr : &it->second;
  }

  const V& at(const std::string& key) const {
    if (const V* v = find(key)) return *v;
    throw std::out_of_range("OrderedDict: no key '" + key + "'");
  }

  // Inserts or overwrites, keeping the original position on overwrite.
  void set(const std::string& key, V value) {
    for (auto& p : items_) {
      if (p.first == key) {
        p.second = std::move(value);
        return;
      }
    }
    items_.emplace_back(key, std::move(value));
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    out.reserve(items_.size());
    for (const auto& p : items_) out.push_back(p.first);
    return out;
  }

  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }

  friend bool operator==(const OrderedDict&, const OrderedDict&) = default;

 private:
  std::vector<value_type> items_;
};

}  // namespace gamelab
