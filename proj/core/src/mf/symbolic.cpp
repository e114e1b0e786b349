#include "horst/mf/symbolic.hpp"

#include <algorithm>

#include "horst/common/error.hpp"

namespace horst::mf {

SymbolicFactor symbolic_analysis(const EliminationTree& t,
                                 const fd::ImpedanceMatrix& A) {
  if (A.n != t.grid.size())
    throw ConfigError("symbolic: matrix and tree sizes differ");
  SymbolicFactor s;
  s.fronts.resize(t.nodes.size());
  std::vector<std::int64_t> scratch;
  for (size_t v = 0; v < t.nodes.size(); ++v) {
    const auto& nd = t.nodes[v];
    FrontSymb& fr = s.fronts[v];
    fr.fs = nd.vars;
    const std::int64_t last =
        t.first_pos[v] + std::int64_t(nd.vars.size()) - 1;

    scratch.clear();
    for (std::int64_t d : fr.fs)
      for (std::int64_t p = A.colptr[d]; p < A.colptr[d + 1]; ++p) {
        const std::int64_t r = A.rowind[p];
        if (t.elimpos[size_t(r)] > last) scratch.push_back(r);
      }
    for (int c : nd.child) {
      if (c < 0) continue;
      for (std::int64_t d : s.fronts[size_t(c)].border)
        if (t.elimpos[size_t(d)] > last) scratch.push_back(d);
    }
    std::sort(scratch.begin(), scratch.end(),
              [&](std::int64_t a, std::int64_t b) {
                return t.elimpos[size_t(a)] < t.elimpos[size_t(b)];
              });
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    fr.border = scratch;

    for (std::int64_t d : fr.border)
      if (!t.is_ancestor(t.owner[size_t(d)], int(v)))
        throw NumericError("symbolic: border variable not owned by an "
                           "ancestor; separators do not separate");

    for (int c : nd.child) {
      if (c < 0) continue;
      const FrontSymb& cf = s.fronts[size_t(c)];
      std::vector<std::int32_t> map(cf.border.size());
      for (size_t k = 0; k < cf.border.size(); ++k) {
        const std::int64_t d = cf.border[k];
        const std::int64_t ep = t.elimpos[size_t(d)];
        if (t.owner[size_t(d)] == std::int32_t(v)) {
          map[k] = std::int32_t(ep - t.first_pos[v]);
        } else {
          const auto it = std::lower_bound(
              fr.border.begin(), fr.border.end(), d,
              [&](std::int64_t a, std::int64_t b) {
                return t.elimpos[size_t(a)] < t.elimpos[size_t(b)];
              });
          if (it == fr.border.end() || *it != d)
            throw NumericError("symbolic: child border lost on the way up");
          map[k] =
              std::int32_t(fr.nfs() + (it - fr.border.begin()));
        }
      }
      fr.child_map.push_back(std::move(map));
    }

    s.fr_entries += std::int64_t(fr.nfs()) * fr.nfs() +
                    2ll * fr.nfs() * fr.nb();
    s.max_front = std::max(s.max_front, std::int64_t(fr.nf()));
  }
  return s;
}

} // namespace horst::mf
