#include "orthorange/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace orthorange {

RawBox RawBox::unbounded(int dim) {
  RawBox b;
  b.dim = dim;
  for (int d = 0; d < dim; ++d) {
    b.lo[d] = kNegInf;
    b.hi[d] = kPosInf;
  }
  return b;
}

RankedPointSet to_rank_space(const std::vector<std::vector<double>>& rows, int dim) {
  RankedPointSet set;
  set.dim = dim;
  set.n = rows.size();
  set.coords.assign(set.n * dim, 0);
  set.dim_values.assign(dim, {});
  std::vector<std::size_t> order(set.n);
  for (int d = 0; d < dim; ++d) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      double va = rows[a][d], vb = rows[b][d];
      if (va != vb) return va < vb;
      return a < b;  // stable tie-break by input index
    });
    auto& vals = set.dim_values[d];
    vals.resize(set.n);
    for (std::size_t r = 0; r < set.n; ++r) {
      set.coords[order[r] * dim + d] = static_cast<Coord>(r + 1);
      vals[r] = rows[order[r]][d];
    }
  }
  return set;
}

RankBox canonicalize_query(const RankedPointSet& set, const RawBox& box) {
  RankBox out;
  out.dim = box.dim;
  const auto n = set.n;
  for (int d = 0; d < box.dim; ++d) {
    const auto& vals = set.dim_values[d];
    assert(!std::isnan(box.lo[d]) && !std::isnan(box.hi[d]));
    if (box.lo[d] == kNegInf) {
      out.lo[d] = 1;
    } else {
      auto it = std::lower_bound(vals.begin(), vals.end(), box.lo[d]);
      out.lo[d] = static_cast<Coord>((it - vals.begin()) + 1);  // may be n+1 (empty)
    }
    if (box.hi[d] == kPosInf) {
      out.hi[d] = static_cast<Coord>(n);
    } else {
      auto it = std::upper_bound(vals.begin(), vals.end(), box.hi[d]);
      out.hi[d] = static_cast<Coord>(it - vals.begin());  // may be 0 (empty)
    }
  }
  return out;
}

}  // namespace orthorange
