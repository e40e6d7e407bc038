#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

namespace distortion_lab {

/// Maximum bipartite matching by augmenting paths (Kuhn). `adj[l]` lists the
/// right vertices adjacent to left vertex l. Returns match[l] = matched right
/// vertex for a perfect matching of the left side, or nullopt.
inline std::optional<std::vector<std::size_t>> perfect_matching(const std::vector<std::vector<std::size_t>>& adj,
                                                                std::size_t right_count) {
  const std::size_t L = adj.size();
  if (L != right_count) return std::nullopt;
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(right_count, none);
  std::vector<char> seen(right_count);

  // Iterative DFS keeps deep augmenting paths off the call stack.
  auto augment = [&](std::size_t root) {
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<std::size_t> path_left{root};
    std::vector<std::size_t> path_right;
    std::vector<std::size_t> cursor{0};
    while (!path_left.empty()) {
      std::size_t l = path_left.back();
      std::size_t& i = cursor.back();
      if (i == adj[l].size()) {
        path_left.pop_back();
        cursor.pop_back();
        if (!path_right.empty()) path_right.pop_back();
        continue;
      }
      std::size_t r = adj[l][i++];
      if (seen[r]) continue;
      seen[r] = 1;
      path_right.push_back(r);
      if (owner[r] == none) {
        for (std::size_t j = 0; j < path_right.size(); ++j) owner[path_right[j]] = path_left[j];
        return true;
      }
      path_left.push_back(owner[r]);
      cursor.push_back(0);
    }
    return false;
  };

  for (std::size_t l = 0; l < L; ++l)
    if (!augment(l)) return std::nullopt;
  std::vector<std::size_t> match(L, none);
  for (std::size_t r = 0; r < right_count; ++r) match[owner[r]] = r;
  return match;
}

}  // namespace distortion_lab
