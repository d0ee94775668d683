#include "selfsim/delaunay.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <limits>
#include <unordered_map>

#include <gmpxx.h>

namespace selfsim {

Tri canonical(Tri t) {
    int m = 0;
    if (t[1] < t[m]) m = 1;
    if (t[2] < t[m]) m = 2;
    return {t[m], t[(m + 1) % 3], t[(m + 2) % 3]};
}

namespace {

std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Triangle soup indexed by directed edges: edge (a,b) maps to the triangle
// that has it counterclockwise.
class Mesh {
public:
    explicit Mesh(const std::vector<Vec2>& p) : p_(p), hint_(p.size(), -1) {}

    int add(int a, int b, int c) {
        int id = static_cast<int>(tris_.size());
        tris_.push_back({a, b, c});
        alive_.push_back(true);
        edges_[key(a, b)] = id;
        edges_[key(b, c)] = id;
        edges_[key(c, a)] = id;
        hint_[a] = hint_[b] = hint_[c] = id;
        return id;
    }

    void remove(int id) {
        auto& t = tris_[id];
        for (int i = 0; i < 3; ++i) {
            auto it = edges_.find(key(t[i], t[(i + 1) % 3]));
            if (it != edges_.end() && it->second == id) edges_.erase(it);
        }
        alive_[id] = false;
    }

    int find(int a, int b) const {
        auto it = edges_.find(key(a, b));
        return it == edges_.end() ? -1 : it->second;
    }

    int third(int id, int a, int b) const {
        for (int v : tris_[id])
            if (v != a && v != b) return v;
        throw std::logic_error("degenerate triangle in mesh");
    }

    // Lawson flips from a stack of directed edges (a,b) whose left triangle is tested.
    void legalize(std::vector<std::pair<int, int>> stack) {
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            int t = find(a, b), u = find(b, a);
            if (t < 0 || u < 0) continue;
            if (is_constrained(a, b)) continue;
            int c = third(t, a, b), d = third(u, b, a);
            if (incircle(p_[a], p_[b], p_[c], p_[d]) <= 0) continue;
            remove(t);
            remove(u);
            add(a, d, c);
            add(d, b, c);
            stack.push_back({a, d});
            stack.push_back({d, b});
            stack.push_back({b, c});
            stack.push_back({c, a});
        }
    }

    bool is_constrained(int a, int b) const {
        return constrained_.count(key(std::min(a, b), std::max(a, b))) > 0;
    }
    void mark_constrained(int a, int b) { constrained_[key(std::min(a, b), std::max(a, b))] = 1; }

    std::vector<Tri> output() const {
        std::vector<Tri> out;
        for (std::size_t i = 0; i < tris_.size(); ++i)
            if (alive_[i]) out.push_back(canonical(tris_[i]));
        std::sort(out.begin(), out.end());
        return out;
    }

    const std::vector<std::array<int, 3>>& tris() const { return tris_; }
    bool alive(int id) const { return alive_[id]; }

    // Live triangles incident to vertex a, as (a, x, y) counterclockwise.
    std::vector<std::array<int, 3>> around(int a) const {
        int start = hint_[a];
        bool ok = start >= 0 && alive_[start];
        if (ok) ok = tris_[start][0] == a || tris_[start][1] == a || tris_[start][2] == a;
        if (!ok) {
            start = -1;
            for (std::size_t id = 0; id < tris_.size() && start < 0; ++id)
                if (alive_[id] && (tris_[id][0] == a || tris_[id][1] == a || tris_[id][2] == a)) start = static_cast<int>(id);
            if (start < 0) return {};
        }
        auto rotate = [&](int id) {
            auto t = tris_[id];
            while (t[0] != a) t = {t[1], t[2], t[0]};
            return t;
        };
        std::vector<std::array<int, 3>> out{rotate(start)};
        for (int id = find(a, out.back()[2]); id >= 0 && id != start; id = find(a, out.back()[2])) out.push_back(rotate(id));
        if (find(a, out.back()[2]) == start) return out;
        std::vector<std::array<int, 3>> back;
        for (int id = find(out.front()[1], a); id >= 0; id = find(back.empty() ? out.front()[1] : back.back()[1], a))
            back.push_back(rotate(id));
        out.insert(out.begin(), back.rbegin(), back.rend());
        return out;
    }

private:
    const std::vector<Vec2>& p_;
    std::vector<std::array<int, 3>> tris_;
    std::vector<bool> alive_;
    std::unordered_map<std::uint64_t, int> edges_;
    std::unordered_map<std::uint64_t, char> constrained_;
    std::vector<int> hint_;
};

// Sweep order: the linear functional x + kSkew y, ties broken lexicographically.
// A generic slope keeps the hull front short on integer grids, where a plain
// lexicographic sweep meets long collinear columns.
constexpr double kSkew = 0.6180339887498949;

bool sweep_less(Vec2 a, Vec2 b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    double f = dx + kSkew * dy;
    double bound = 4 * std::numeric_limits<double>::epsilon() *
                   (std::fabs(a.x) + std::fabs(b.x) + kSkew * (std::fabs(a.y) + std::fabs(b.y)));
    if (f < -bound) return true;
    if (f > bound) return false;
    mpq_class e = (mpq_class(a.x) - mpq_class(b.x)) + mpq_class(kSkew) * (mpq_class(a.y) - mpq_class(b.y));
    if (e != 0) return e < 0;
    return a < b;
}

void build(Mesh& mesh, const std::vector<Vec2>& p) {
    const int n = static_cast<int>(p.size());
    if (n < 3) throw std::invalid_argument("delaunay needs at least 3 points");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return sweep_less(p[a], p[b]); });
    for (int i = 1; i < n; ++i)
        if (p[order[i]] == p[order[i - 1]]) throw std::invalid_argument("delaunay input has duplicate points");

    // Initial collinear run, closed off by the first point off the line.
    int k = 2;
    while (k < n && orient2d(p[order[0]], p[order[1]], p[order[k]]) == 0) ++k;
    if (k == n) throw std::invalid_argument("delaunay input is collinear");
    const int q = order[k];
    std::vector<int> hull;
    std::vector<std::pair<int, int>> stack;
    if (orient2d(p[order[0]], p[order[1]], p[q]) > 0) {
        for (int i = 0; i + 1 < k; ++i) {
            mesh.add(order[i], order[i + 1], q);
            stack.push_back({order[i + 1], q});
        }
        for (int i = 0; i < k; ++i) hull.push_back(order[i]);
        hull.push_back(q);
    } else {
        for (int i = 0; i + 1 < k; ++i) {
            mesh.add(order[i + 1], order[i], q);
            stack.push_back({q, order[i + 1]});
        }
        for (int i = k - 1; i >= 0; --i) hull.push_back(order[i]);
        hull.push_back(q);
    }
    mesh.legalize(std::move(stack));

    // Hull as a counterclockwise linked list; the last inserted point is
    // extreme in sweep order, so the visible chain always touches it.
    std::vector<int> nxt(n, -1), prv(n, -1);
    for (std::size_t i = 0; i < hull.size(); ++i) {
        nxt[hull[i]] = hull[(i + 1) % hull.size()];
        prv[hull[(i + 1) % hull.size()]] = hull[i];
    }
    int last = q;
    for (int idx = k + 1; idx < n; ++idx) {
        const int v = order[idx];
        stack.clear();
        int r = last;
        while (orient2d(p[r], p[nxt[r]], p[v]) < 0) {
            mesh.add(r, v, nxt[r]);
            stack.push_back({nxt[r], r});
            r = nxt[r];
        }
        int l = last;
        while (orient2d(p[prv[l]], p[l], p[v]) < 0) {
            mesh.add(prv[l], v, l);
            stack.push_back({l, prv[l]});
            l = prv[l];
        }
        if (l == last && r == last) throw std::logic_error("new point sees no hull edge");
        nxt[l] = v;
        prv[v] = l;
        nxt[v] = r;
        prv[r] = v;
        last = v;
        mesh.legalize(std::move(stack));
    }
}

void triangulate_pseudo_polygon(Mesh& mesh, const std::vector<Vec2>& p, int a, int b, const std::vector<int>& chain,
                                bool left) {
    if (chain.empty()) return;
    std::size_t ci = 0;
    for (std::size_t i = 1; i < chain.size(); ++i) {
        int c = chain[ci];
        bool inside = left ? incircle(p[a], p[b], p[c], p[chain[i]]) > 0 : incircle(p[b], p[a], p[c], p[chain[i]]) > 0;
        if (inside) ci = i;
    }
    int c = chain[ci];
    if (left)
        mesh.add(a, b, c);
    else
        mesh.add(b, a, c);
    std::vector<int> first(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(ci));
    std::vector<int> second(chain.begin() + static_cast<std::ptrdiff_t>(ci) + 1, chain.end());
    triangulate_pseudo_polygon(mesh, p, a, c, first, left);
    triangulate_pseudo_polygon(mesh, p, c, b, second, left);
}

void insert_segment(Mesh& mesh, const std::vector<Vec2>& p, int a, int b) {
    if (a == b) throw std::invalid_argument("degenerate constraint segment");
    mesh.mark_constrained(a, b);
    if (mesh.find(a, b) >= 0 || mesh.find(b, a) >= 0) return;
    // First crossed edge: a triangle (a, x, y) with x and y strictly on opposite sides of ab.
    int L = -1, R = -1, cur = -1;
    for (const auto& t : mesh.around(a)) {
        int x = t[1], y = t[2];
        int ox = orient2d(p[a], p[b], p[x]), oy = orient2d(p[a], p[b], p[y]);
        if (ox == 0 && dot(p[x] - p[a], p[b] - p[a]) > 0 && norm(p[x] - p[a]) < norm(p[b] - p[a]))
            throw std::invalid_argument("constraint segment passes through a point");
        if (ox < 0 && oy > 0) {
            R = x;
            L = y;
            cur = mesh.find(a, x);
        }
    }
    if (cur < 0) throw std::invalid_argument("constraint segment leaves the triangulation");
    std::vector<int> removed{cur}, left{L}, right{R};
    while (true) {
        // Triangle across edge (L, R) from the current side: it has edge (L, R) counterclockwise.
        if (mesh.is_constrained(L, R)) throw std::invalid_argument("constraint segments cross");
        int u = mesh.find(L, R);
        if (u < 0) throw std::invalid_argument("constraint segment leaves the triangulation");
        removed.push_back(u);
        int z = mesh.third(u, L, R);
        if (z == b) break;
        int oz = orient2d(p[a], p[b], p[z]);
        if (oz == 0) throw std::invalid_argument("constraint segment passes through a point");
        if (oz > 0) {
            L = z;
            left.push_back(z);
        } else {
            R = z;
            right.push_back(z);
        }
    }
    for (int id : removed) mesh.remove(id);
    triangulate_pseudo_polygon(mesh, p, a, b, left, true);
    triangulate_pseudo_polygon(mesh, p, a, b, right, false);
}

}  // namespace

std::vector<Tri> delaunay(const std::vector<Vec2>& points) {
    Mesh mesh(points);
    build(mesh, points);
    return mesh.output();
}

std::vector<Tri> constrained_delaunay(const std::vector<Vec2>& points,
                                      const std::vector<std::pair<int, int>>& segments) {
    Mesh mesh(points);
    build(mesh, points);
    for (auto [a, b] : segments) insert_segment(mesh, points, a, b);
    return mesh.output();
}

}  // namespace selfsim
