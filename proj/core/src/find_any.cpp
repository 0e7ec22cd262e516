#include "orthorange/find_any.hpp"

#include <algorithm>
#include <bit>

namespace orthorange {

FindAnyIndex::FindAnyIndex(std::span<const Point3> apexes) {
  const std::size_t n = apexes.size();
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (apexes[a].z != apexes[b].z) return apexes[a].z > apexes[b].z;
    return apexes[a].id < apexes[b].id;
  });
  zs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) zs_[i] = apexes[order[i]].z;

  std::size_t p = 1;
  while (p < std::max<std::size_t>(n, 1)) p <<= 1;
  base_ = p;
  nodes_.assign(2 * p, {});
  for (std::size_t i = 0; i < n; ++i) {
    const Point3& a = apexes[order[i]];
    nodes_[base_ + i] = {Entry{a.x, a.y, a.id}};
  }
  auto maxima = [](std::vector<Entry> v) {
    std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) {
      if (a.x != b.x) return a.x < b.x;
      if (a.y != b.y) return a.y < b.y;
      return a.id > b.id;
    });
    std::vector<Entry> out;
    Coord best_y = 0;
    bool any = false;
    for (std::size_t i = v.size(); i-- > 0;) {
      if (!any || v[i].y > best_y) {
        out.push_back(v[i]);
        best_y = v[i].y;
        any = true;
      }
    }
    std::reverse(out.begin(), out.end());
    return out;
  };
  for (std::size_t v = base_; v-- > 1;) {
    std::vector<Entry> merged = nodes_[2 * v];
    merged.insert(merged.end(), nodes_[2 * v + 1].begin(), nodes_[2 * v + 1].end());
    nodes_[v] = maxima(std::move(merged));
  }
  entries_ = zs_.size();
  for (const auto& st : nodes_) entries_ += st.size();
}

std::optional<PointId> FindAnyIndex::find(Coord x, Coord y, Coord z) const {
  if (zs_.empty()) return std::nullopt;
  comparisons_ += std::bit_width(zs_.size()) + 1;
  const std::size_t v = static_cast<std::size_t>(
      std::partition_point(zs_.begin(), zs_.end(),
                           [&](Coord w) { return w >= z; }) -
      zs_.begin());
  if (v == 0) return std::nullopt;

  bool found = false;
  Entry best{0, 0, 0};
  auto visit = [&](const std::vector<Entry>& st) {
    comparisons_ += std::bit_width(st.size()) + 1;
    const auto it = std::partition_point(
        st.begin(), st.end(), [&](const Entry& e) { return e.x < x; });
    if (it == st.end()) return;
    if (!found || it->y > best.y || (it->y == best.y && it->id < best.id)) {
      best = *it;
      found = true;
    }
  };
  std::size_t lo = base_, hi = base_ + v;
  while (lo < hi) {
    if (lo & 1) visit(nodes_[lo++]);
    if (hi & 1) visit(nodes_[--hi]);
    lo /= 2;
    hi /= 2;
  }
  ++comparisons_;
  if (found && best.y >= y) return best.id;
  return std::nullopt;
}

}  // namespace orthorange
