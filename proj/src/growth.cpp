#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numeric>
#include <queue>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "lattice_internal.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/lattice_tiling.hpp"

namespace selfsim {

using detail::CoordsHash;
using detail::exact_plane;

LatticeTriangle PatchTiling::triangle(std::size_t i) const {
    const auto& t = triangles.at(i);
    return {{vertices[t.v[0]], vertices[t.v[1]], vertices[t.v[2]]}};
}

namespace {

class VertexPool {
public:
    explicit VertexPool(PatchTiling& p) : p_(p) {
        for (std::size_t i = 0; i < p.vertices.size(); ++i) index_[p.vertices[i]] = static_cast<std::int32_t>(i);
    }
    std::int32_t id(const LatticeCoords& c) {
        auto [it, fresh] = index_.try_emplace(c, static_cast<std::int32_t>(p_.vertices.size()));
        if (fresh) p_.vertices.push_back(c);
        return it->second;
    }
    void add(const LatticeTriangle& t, int label) { p_.triangles.push_back({{id(t.v[0]), id(t.v[1]), id(t.v[2])}, label}); }

private:
    PatchTiling& p_;
    std::unordered_map<LatticeCoords, std::int32_t, CoordsHash> index_;
};

LatticeTriangle translate(const LatticeTriangle& t, const LatticeCoords& o) {
    return {{detail::add(t.v[0], o), detail::add(t.v[1], o), detail::add(t.v[2], o)}};
}

}  // namespace

PatchTiling grow_tiling(const FieldContext& ctx, const ConstructionConstants& consts,
                        const std::vector<LatticeCoords>& T0, const std::vector<LatticeTriangle>& annulus,
                        int generations, std::size_t max_triangles, int jobs) {
    if (!exact_plane(ctx)) throw MathRefusal("growth is implemented for degree 2 fields with nonreal lambda only");
    if (generations < 0) throw std::invalid_argument("generations must be nonnegative");
    const int top = consts.n + 2;
    PatchTiling patch;
    patch.n = consts.n;
    patch.central_tiles.push_back(LatticeCoords(ctx.coeff_dim(), 0));
    for (int g = 1; g <= generations; ++g) {
        for (auto& v : patch.vertices) v = ctx.mul_lambda(v);
        std::vector<LatticeTriangle> to_split;
        std::vector<PatchTiling::Tile> kept;
        for (auto& t : patch.triangles) {
            if (t.label == top) {
                to_split.push_back({{patch.vertices[t.v[0]], patch.vertices[t.v[1]], patch.vertices[t.v[2]]}});
            } else {
                kept.push_back(t);
                kept.back().label += 1;
            }
        }
        patch.triangles = std::move(kept);
        patch.subdivided += to_split.size();
        for (auto& o : patch.central_tiles) o = ctx.mul_lambda(o);

        std::vector<SubdivisionResult> parts(to_split.size());
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t i = next++; i < to_split.size(); i = next++) {
                try {
                    parts[i] = subdivide_absolute(ctx, consts, T0, to_split[i], ReferenceSurface(), true,
                                                  SubdivisionMode::Clipped);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int j = 1; j < std::max(1, jobs); ++j) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);

        // Every T0 copy grows into itself plus a label 1 annulus; a central
        // tile lambda T0 + c enters the same way as T0 + c.
        VertexPool vp(patch);
        for (auto& part : parts) {
            for (auto& t : part.triangles) vp.add(t, 1);
            patch.central_tiles.push_back(*part.central_offset);
        }
        for (auto& o : patch.central_tiles)
            for (auto& a : annulus) vp.add(translate(a, o), 1);
        patch.generation = g;
        if (patch.triangles.size() > max_triangles)
            throw ResourceError("patch exceeded " + std::to_string(max_triangles) + " triangles at generation " +
                                std::to_string(g));
    }
    return patch;
}

GrowthReport check_patch(const FieldContext& ctx, const PatchTiling& patch, const std::vector<LatticeCoords>& T0) {
    if (!exact_plane(ctx)) throw MathRefusal("patch checks need a degree 2 field with nonreal lambda");
    GrowthReport rep;
    const int top = patch.n + 2;
    rep.label_histogram.assign(static_cast<std::size_t>(top) + 1, 0);
    rep.label_histogram[0] = patch.central_tiles.size();
    for (auto& t : patch.triangles) {
        if (t.label < 1 || t.label > top) rep.labels_ok = false;
        else ++rep.label_histogram[static_cast<std::size_t>(t.label)];
    }

    // Geometric edge adjacency: edges on a common line whose intervals overlap.
    struct Interval {
        std::int64_t lo, hi;
        std::size_t tri;
    };
    std::map<std::array<std::int64_t, 3>, std::vector<Interval>> lines;
    for (std::size_t i = 0; i < patch.triangles.size(); ++i) {
        auto& t = patch.triangles[i];
        for (int j = 0; j < 3; ++j) {
            const auto& a = patch.vertices[t.v[j]];
            const auto& b = patch.vertices[t.v[(j + 1) % 3]];
            std::int64_t dx = b[0] - a[0], dy = b[1] - a[1];
            std::int64_t g = std::gcd(dx, dy);
            dx /= g;
            dy /= g;
            if (dx < 0 || (dx == 0 && dy < 0)) {
                dx = -dx;
                dy = -dy;
            }
            std::int64_t off = dx * a[1] - dy * a[0];
            std::int64_t pa = dx * a[0] + dy * a[1], pb = dx * b[0] + dy * b[1];
            lines[{dx, dy, off}].push_back({std::min(pa, pb), std::max(pa, pb), i});
        }
    }
    auto compatible = [top](int a, int b) {
        int d = ((a - b) % top + top) % top;
        return d == 0 || d == 1 || d == top - 1;
    };
    for (auto& [key, iv] : lines) {
        std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> active;
        for (auto& cur : iv) {
            std::erase_if(active, [&](const Interval& a) { return a.hi <= cur.lo; });
            for (auto& a : active)
                if (a.tri != cur.tri && !compatible(patch.triangles[a.tri].label, patch.triangles[cur.tri].label))
                    rep.labels_ok = false;
            active.push_back(cur);
        }
    }

    std::vector<std::array<Vec2, 3>> shapes;
    for (std::size_t i = 0; i < patch.triangles.size(); ++i) shapes.push_back(planar(ctx, patch.triangle(i)));
    std::vector<LatticeCoords> scaled_T0 = T0;
    for (auto& v : scaled_T0) v = ctx.mul_lambda_pow(v, patch.generation);
    for (auto& o : patch.central_tiles)
        for (std::size_t i = 1; i + 1 < T0.size(); ++i)
            shapes.push_back({ctx.planar(detail::add(T0[0], o)), ctx.planar(detail::add(T0[i], o)),
                              ctx.planar(detail::add(T0[i + 1], o))});
    rep.overlap_free = detail::overlap_free(shapes);

    std::int64_t r = 0;
    for (std::size_t i = 1; i + 1 < scaled_T0.size(); ++i) r += detail::cross2(ctx, scaled_T0[0], scaled_T0[i], scaled_T0[i + 1]);
    for (std::size_t i = 0; i < patch.triangles.size(); ++i) {
        auto t = patch.triangle(i);
        r -= detail::cross2(ctx, t.v[0], t.v[1], t.v[2]);
    }
    std::int64_t t0 = 0;
    for (std::size_t i = 1; i + 1 < T0.size(); ++i) t0 += detail::cross2(ctx, T0[0], T0[i], T0[i + 1]);
    r -= t0 * static_cast<std::int64_t>(patch.central_tiles.size());
    rep.cover_residual = r;
    return rep;
}

std::vector<LatticeCoords> edge_arc(const FieldContext& ctx, const ConstructionConstants& consts,
                                    const std::vector<LatticeTriangle>& triangulation, const LatticeCoords& a,
                                    const LatticeCoords& b) {
    Vec2 pa = ctx.planar(a), pb = ctx.planar(b);
    std::unordered_map<LatticeCoords, int, CoordsHash> id;
    std::vector<LatticeCoords> verts;
    std::vector<std::vector<int>> adj;
    auto vid = [&](const LatticeCoords& c) {
        auto [it, fresh] = id.try_emplace(c, static_cast<int>(verts.size()));
        if (fresh) {
            verts.push_back(c);
            adj.emplace_back();
        }
        return it->second;
    };
    for (auto& t : triangulation) {
        auto q = planar(ctx, t);
        Circle cc = circumcircle(q[0], q[1], q[2]);
        if (!(distance_to_segment(cc.center, pa, pb) + cc.radius < consts.r2)) continue;
        int ids[3] = {vid(t.v[0]), vid(t.v[1]), vid(t.v[2])};
        for (int j = 0; j < 3; ++j) {
            adj[ids[j]].push_back(ids[(j + 1) % 3]);
            adj[ids[(j + 1) % 3]].push_back(ids[j]);
        }
    }
    auto ia = id.find(a), ib = id.find(b);
    if (ia == id.end() || ib == id.end()) throw ConstructionError("arc endpoint is not in the edge zone triangulation");
    // Lengths from coefficient differences, so translated zones give identical sums.
    auto len = [&](int u, int v) { return norm(ctx.planar(detail::sub(verts[v], verts[u]))); };
    std::vector<double> dist(verts.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[ia->second] = 0;
    pq.push({0, ia->second});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (int v : adj[u]) {
            double nd = d + len(u, v);
            if (nd < dist[v]) {
                dist[v] = nd;
                pq.push({nd, v});
            }
        }
    }
    if (!std::isfinite(dist[ib->second])) throw ConstructionError("edge zone graph is disconnected");
    std::vector<LatticeCoords> path{b};
    for (int v = ib->second; v != ia->second;) {
        int best = -1;
        for (int u : adj[v])
            if (dist[u] < dist[v] && dist[u] + len(u, v) <= dist[v] + 1e-9 && (best < 0 || verts[u] < verts[best])) best = u;
        v = best;
        path.push_back(verts[v]);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

namespace {

/// Free reduction of a vertex path: drop every immediate return p, q, p -> p.
std::vector<LatticeCoords> remove_backtracks(const std::vector<LatticeCoords>& closed) {
    std::vector<LatticeCoords> st;
    for (auto& p : closed) {
        if (!st.empty() && st.back() == p) continue;
        if (st.size() >= 2 && st[st.size() - 2] == p) {
            st.pop_back();
            continue;
        }
        st.push_back(p);
    }
    // Cyclic reduction across the closing vertex.
    if (st.size() > 1 && st.front() == st.back()) st.pop_back();
    while (st.size() >= 3 && st[1] == st.back()) {
        st.erase(st.begin());
        st.pop_back();
        if (st.size() > 1 && st.front() == st.back()) st.pop_back();
    }
    while (st.size() >= 3 && st.front() == st[st.size() - 2]) {
        st.pop_back();
        if (st.size() > 1 && st.front() == st.back()) st.pop_back();
    }
    return st;
}

}  // namespace

BoundaryRefinement refine_boundary(const FieldContext& ctx, const ConstructionConstants& consts,
                                   const std::vector<LatticeCoords>& T0, const LatticeTriangle& t_in, int k) {
    (void)T0;
    if (!exact_plane(ctx)) throw MathRefusal("boundary refinement needs a degree 2 field with nonreal lambda");
    if (k < 1) throw std::invalid_argument("refinement level must be at least 1");
    if (k > 2) throw ResourceError("refinement levels above 2 exceed the memory budget");
    LatticeTriangle t = t_in;
    if (detail::orient_lattice(ctx, t.v[0], t.v[1], t.v[2]) < 0) std::swap(t.v[1], t.v[2]);
    const int N = consts.exponent();
    const LatticeCoords zero(ctx.coeff_dim(), 0);

    std::map<LatticeCoords, std::vector<LatticeCoords>> memo;
    auto arc = [&](const LatticeCoords& e) -> const std::vector<LatticeCoords>& {
        auto it = memo.find(e);
        if (it != memo.end()) return it->second;
        LatticeCoords B = ctx.mul_lambda_pow(e, N);
        Vec2 pa{0, 0}, pb = ctx.planar(B);
        PlanarRegion region;
        region.lo = {std::min(pa.x, pb.x) - consts.r1, std::min(pa.y, pb.y) - consts.r1};
        region.hi = {std::max(pa.x, pb.x) + consts.r1, std::max(pa.y, pb.y) + consts.r1};
        region.contains = [&](Vec2 p) {
            return norm(p - pa) < consts.r1 || norm(p - pb) < consts.r1 || distance_to_segment(p, pa, pb) < consts.r2;
        };
        auto pts = lattice_points_in_region(ctx, region, 1.0, ReferenceSurface());
        std::vector<Vec2> pl;
        for (auto& p : pts) pl.push_back(ctx.planar(p));
        std::vector<LatticeTriangle> tris;
        for (auto& q : delaunay(pl)) tris.push_back({{pts[q[0]], pts[q[1]], pts[q[2]]}});
        return memo[e] = edge_arc(ctx, consts, tris, zero, B);
    };

    const std::complex<double> lam = ctx.lambda();
    auto to_curve = [&](const std::vector<LatticeCoords>& pts, int level) {
        Polyline p;
        p.closed = true;
        std::complex<double> s = std::pow(lam, -static_cast<double>(N) * level);
        for (auto& c : pts) {
            Vec2 q = ctx.planar(c);
            std::complex<double> z = std::complex<double>(q.x, q.y) * s;
            p.vertices.push_back({z.real(), z.imag()});
        }
        return p;
    };

    BoundaryRefinement out;
    std::vector<LatticeCoords> cur(t.v.begin(), t.v.end());
    out.curves.push_back(to_curve(cur, 0));
    double step = 1e30;
    for (int j = 0; j < 3; ++j) step = std::min(step, norm(ctx.planar(detail::sub(t.v[(j + 1) % 3], t.v[j]))));
    step *= 1e-3;
    for (int level = 1; level <= k; ++level) {
        std::vector<LatticeCoords> next;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const auto& P = cur[i];
            const auto& Q = cur[(i + 1) % cur.size()];
            LatticeCoords base = ctx.mul_lambda_pow(P, N);
            const auto& a = arc(detail::sub(Q, P));
            for (std::size_t s = 0; s + 1 < a.size(); ++s) next.push_back(detail::add(base, a[s]));
        }
        cur = remove_backtracks(next);
        // Simplicity is invariant under the linear map to coefficient
        // coordinates, where the vertices are integers and the predicates stay cheap.
        Polyline raw;
        raw.closed = true;
        for (auto& c : cur) raw.vertices.push_back({static_cast<double>(c[0]), static_cast<double>(c[1])});
        out.simple = out.simple && simplicity_check(raw);
        out.curves.push_back(to_curve(cur, level));
        double d = hausdorff_distance(out.curves[level - 1], out.curves[level], step);
        out.hausdorff.push_back(d);
        out.fitted_constant = std::max(out.fitted_constant, d * std::pow(ctx.lambda_abs(), static_cast<double>(level) * N));
    }
    out.curves.erase(out.curves.begin());
    return out;
}

std::string patch_to_json(const FieldContext& ctx, const PatchTiling& patch) {
    nlohmann::ordered_json j;
    j["generation"] = patch.generation;
    j["n"] = patch.n;
    auto verts = nlohmann::ordered_json::array();
    for (auto& v : patch.vertices) {
        Vec2 p = ctx.planar(v);
        verts.push_back({{"coeffs", v}, {"planar", {p.x, p.y}}});
    }
    j["vertices"] = std::move(verts);
    auto tris = nlohmann::ordered_json::array();
    for (auto& t : patch.triangles) tris.push_back({{"v", {t.v[0], t.v[1], t.v[2]}}, {"label", t.label}});
    j["triangles"] = std::move(tris);
    j["central_tiles"] = patch.central_tiles;
    return j.dump();
}

std::string constants_to_json(const ConstructionConstants& c) {
    nlohmann::ordered_json j;
    j["M"] = c.M;
    j["theta"] = c.theta;
    j["r1"] = c.r1;
    j["r2"] = c.r2;
    j["n"] = c.n;
    j["exponent"] = c.exponent();
    j["cond1"] = c.cond1;
    j["cond2"] = c.cond2;
    j["cond3"] = c.cond3;
    j["n_flat"] = c.n_flat;
    j["n_inradius"] = c.n_inradius;
    j["flat_ratio"] = c.flat_ratio;
    j["difference_set_size"] = c.difference_set_size;
    j["flat_per_triangle"] = c.flat_per_triangle;
    return j.dump();
}

}  // namespace selfsim
