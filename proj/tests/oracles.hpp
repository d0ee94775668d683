#pragma once

// Brute-force reference implementations shared by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <vector>

#include "selfsim/delaunay.hpp"
#include "selfsim/geometry.hpp"

namespace oracle {

/// Every counterclockwise triangle whose perturbed circumcircle has all other
/// points outside. O(n^4).
inline std::vector<selfsim::Tri> delaunay_bruteforce(const std::vector<selfsim::Vec2>& p) {
    const int n = static_cast<int>(p.size());
    std::vector<selfsim::Tri> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                int o = selfsim::orient2d(p[i], p[j], p[k]);
                if (o == 0) continue;
                selfsim::Tri t = o > 0 ? selfsim::Tri{i, j, k} : selfsim::Tri{i, k, j};
                bool empty = true;
                for (int l = 0; l < n && empty; ++l) {
                    if (l == i || l == j || l == k) continue;
                    if (selfsim::incircle(p[t[0]], p[t[1]], p[t[2]], p[l]) >= 0) empty = false;
                }
                if (empty) out.push_back(selfsim::canonical(t));
            }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace oracle
