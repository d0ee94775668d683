#include "selfsim/tiling_render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

Vec2 to_vec(std::complex<double> z) { return {z.real(), z.imag()}; }

std::vector<std::pair<Vec2, Vec2>> segments_of(const Polyline& p) {
    std::vector<std::pair<Vec2, Vec2>> s;
    const auto& v = p.vertices;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) s.emplace_back(v[i], v[i + 1]);
    if (p.closed && v.size() > 1) s.emplace_back(v.back(), v.front());
    return s;
}

// Uniform grid over segment bounding boxes.
class SegmentGrid {
public:
    explicit SegmentGrid(std::vector<std::pair<Vec2, Vec2>> segs) : segs_(std::move(segs)) {
        lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        Vec2 hi{-lo_.x, -lo_.y};
        for (auto& [a, b] : segs_)
            for (Vec2 p : {a, b}) {
                lo_.x = std::min(lo_.x, p.x);
                lo_.y = std::min(lo_.y, p.y);
                hi.x = std::max(hi.x, p.x);
                hi.y = std::max(hi.y, p.y);
            }
        hi_ = hi;
        double extent = std::max(hi.x - lo_.x, hi.y - lo_.y);
        double per_side = std::max(1.0, std::ceil(std::sqrt(static_cast<double>(segs_.size()))));
        per_side = std::min(per_side, 2048.0);
        h_ = extent > 0 ? extent / per_side : 1.0;
        nx_ = static_cast<int>((hi.x - lo_.x) / h_) + 1;
        ny_ = static_cast<int>((hi.y - lo_.y) / h_) + 1;
        cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            auto [a, b] = segs_[i];
            int x0 = cx(std::min(a.x, b.x)), x1 = cx(std::max(a.x, b.x));
            int y0 = cy(std::min(a.y, b.y)), y1 = cy(std::max(a.y, b.y));
            for (int x = x0; x <= x1; ++x)
                for (int y = y0; y <= y1; ++y) cells_[static_cast<std::size_t>(y) * nx_ + x].push_back(static_cast<int>(i));
        }
    }

    double nearest(Vec2 p) const {
        Vec2 q{std::clamp(p.x, lo_.x, hi_.x), std::clamp(p.y, lo_.y, hi_.y)};
        int px = cx(q.x), py = cy(q.y);
        double best = std::numeric_limits<double>::infinity();
        const int rmax = std::max(nx_, ny_);
        for (int r = 0; r <= rmax; ++r) {
            for (int x = px - r; x <= px + r; ++x)
                for (int y = py - r; y <= py + r; ++y) {
                    if (std::max(std::abs(x - px), std::abs(y - py)) != r) continue;
                    if (x < 0 || y < 0 || x >= nx_ || y >= ny_) continue;
                    for (int i : cells_[static_cast<std::size_t>(y) * nx_ + x])
                        best = std::min(best, distance_to_segment(p, segs_[i].first, segs_[i].second));
                }
            // Cells beyond ring r are at least r*h from the clamped point, and
            // clamping onto the box does not increase distances to it.
            if (best <= r * h_) break;
        }
        return best;
    }

    const std::vector<std::vector<int>>& cells() const { return cells_; }

private:
    int cx(double x) const { return std::clamp(static_cast<int>((x - lo_.x) / h_), 0, nx_ - 1); }
    int cy(double y) const { return std::clamp(static_cast<int>((y - lo_.y) / h_), 0, ny_ - 1); }

    std::vector<std::pair<Vec2, Vec2>> segs_;
    Vec2 lo_, hi_;
    double h_ = 1;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> cells_;
};

double directed_hausdorff(const Polyline& a, const SegmentGrid& grid, double step) {
    double worst = 0;
    auto segs = segments_of(a);
    if (segs.empty()) return grid.nearest(a.vertices.front());
    for (auto& [p, q] : segs) {
        double len = norm(q - p);
        int pieces = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 0; k <= pieces; ++k) {
            Vec2 s = p + (static_cast<double>(k) / pieces) * (q - p);
            worst = std::max(worst, grid.nearest(s));
        }
    }
    return worst;
}

std::string fmt(double v) {
    char buf[64];
    if (std::fabs(v) < 5e-7) v = 0;
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::vector<std::complex<double>> generator_vectors(std::complex<double> lambda, int n) {
    std::vector<std::complex<double>> v;
    std::complex<double> pw = 1;
    for (int i = 0; i < n; ++i, pw *= lambda) v.push_back(pw);
    return v;
}

std::complex<double> word_endpoint(const Word& w, const std::vector<std::complex<double>>& gen_vectors) {
    std::complex<double> e = 0;
    for (auto l : w.letters()) {
        if (l.gen > static_cast<int>(gen_vectors.size())) throw std::invalid_argument("word uses a generator without a vector");
        e += static_cast<double>(l.exp) * gen_vectors[l.gen - 1];
    }
    return e;
}

Polyline word_to_path(const Word& w, const std::vector<std::complex<double>>& gen_vectors) {
    Polyline p;
    std::complex<double> cur = 0;
    double scale = 0;
    p.vertices.push_back({0, 0});
    for (auto l : w.letters()) {
        if (l.gen > static_cast<int>(gen_vectors.size())) throw std::invalid_argument("word uses a generator without a vector");
        cur += static_cast<double>(l.exp) * gen_vectors[l.gen - 1];
        scale = std::max(scale, std::abs(gen_vectors[l.gen - 1]));
        p.vertices.push_back(to_vec(cur));
    }
    if (p.vertices.size() > 2 && std::abs(cur) < 1e-9 * std::max(1.0, scale)) {
        p.vertices.pop_back();
        p.closed = true;
    }
    return p;
}

double signed_area(const Polyline& p) {
    if (!p.closed) throw std::invalid_argument("signed_area needs a closed polyline");
    // Shoelace relative to the first vertex to limit cancellation.
    const auto& v = p.vertices;
    double s = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += cross(v[i] - v[0], v[i + 1] - v[0]);
    return 0.5 * s;
}

Word iterate_endo(const Endomorphism& phi, Word x, int k) {
    for (int i = 0; i < k; ++i) x = apply_endo(phi, x);
    return x;
}

Polyline boundary_approx(const Endomorphism& phi, std::pair<int, int> pair, int k, std::complex<double> lambda) {
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
    auto rep = consistency_check(phi, lambda);
    if (!rep.pass) throw MathRefusal("endomorphism is not consistent with the expansion lambda");
    auto [i, j] = pair;
    if (i < 1 || j > phi.n || i == j) throw std::invalid_argument("bad commutator pair");
    Word x = commutator(Word::generator(i), Word::generator(j));
    Word w = iterate_endo(phi, x, k);
    std::complex<double> inv_pow = std::pow(lambda, -k);
    auto vecs = generator_vectors(lambda, phi.n);
    for (auto& v : vecs) v *= inv_pow;
    // Conjugation only translates the loop; drop the spike it adds at the origin.
    auto cyc = cyclic_reduce(w);
    auto p = word_to_path(cyc.core, vecs);
    if (!p.closed) throw ConstructionError("image of a commutator did not close up");
    Vec2 shift = to_vec(word_endpoint(cyc.conjugator, vecs));
    for (auto& v : p.vertices) v += shift;
    return p;
}

std::vector<TilePlacement> subdivision_layout(const Endomorphism& phi, std::pair<int, int> pair,
                                              std::complex<double> lambda, int level) {
    auto [i, j] = pair;
    auto d = decompose_commutator(phi.images[i - 1], phi.images[j - 1]);
    auto vecs = generator_vectors(lambda, phi.n);
    std::vector<TilePlacement> out;
    for (auto& f : d) {
        if (f.sign < 0)
            throw NegativeExponentError(pair_name(i, j), "image contains " + pair_name(f.pair.first, f.pair.second) + "^-1");
        out.push_back({f.pair, word_endpoint(f.conjugator, vecs), level});
    }
    return out;
}

Polyline tile_shape(std::pair<int, int> pair, const std::vector<std::complex<double>>& gen_vectors,
                    std::complex<double> t) {
    auto u = gen_vectors.at(pair.first - 1), v = gen_vectors.at(pair.second - 1);
    Polyline p;
    p.closed = true;
    for (auto z : {t, t + u, t + u + v, t + v}) p.vertices.push_back(to_vec(z));
    return p;
}

double hausdorff_distance(const Polyline& a, const Polyline& b, double step) {
    if (a.vertices.empty() || b.vertices.empty()) throw std::invalid_argument("hausdorff_distance of an empty polyline");
    auto seg_or_point = [](const Polyline& p) {
        auto s = segments_of(p);
        if (s.empty()) s.emplace_back(p.vertices.front(), p.vertices.front());
        return s;
    };
    SegmentGrid ga(seg_or_point(a)), gb(seg_or_point(b));
    return std::max(directed_hausdorff(a, gb, step), directed_hausdorff(b, ga, step));
}

bool simplicity_check(const Polyline& p) {
    if (!p.closed) throw std::invalid_argument("simplicity_check needs a closed polyline");
    const auto& v = p.vertices;
    const std::size_t n = v.size();
    if (n < 3) return false;
    auto segs = segments_of(p);
    for (auto& [a, b] : segs)
        if (a == b) return false;
    auto adjacent = [n](std::size_t i, std::size_t j) { return j == i + 1 || (i == 0 && j == n - 1); };
    // Adjacent segments must not fold back onto each other.
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = v[i], m = v[(i + 1) % n], b = v[(i + 2) % n];
        if (orient2d(a, m, b) == 0 && dot(a - m, b - m) > 0) return false;
    }
    SegmentGrid grid(segs);
    for (auto& cell : grid.cells())
        for (std::size_t x = 0; x < cell.size(); ++x)
            for (std::size_t y = x + 1; y < cell.size(); ++y) {
                std::size_t i = std::min(cell[x], cell[y]), j = std::max(cell[x], cell[y]);
                if (adjacent(i, j)) continue;
                if (segments_intersect(segs[i].first, segs[i].second, segs[j].first, segs[j].second)) return false;
            }
    return true;
}

std::vector<Polyline> arrange_in_row(const std::vector<Polyline>& items, double gap) {
    std::vector<Polyline> out;
    double cursor = 0;
    for (auto p : items) {
        if (p.vertices.empty()) {
            out.push_back(p);
            continue;
        }
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (auto& q : p.vertices) {
            lo = std::min(lo, q.x);
            hi = std::max(hi, q.x);
        }
        for (auto& q : p.vertices) q.x += cursor - lo;
        cursor += (hi - lo) + gap;
        out.push_back(std::move(p));
    }
    return out;
}

std::string render_svg(const std::vector<RenderItem>& items, const RenderConfig& config) {
    if (!(config.scale > 0)) throw std::invalid_argument("render scale must be positive");
    double minx = std::numeric_limits<double>::infinity(), miny = minx, maxx = -minx, maxy = -minx;
    for (auto& it : items)
        for (auto& q : it.shape.vertices) {
            minx = std::min(minx, q.x);
            maxx = std::max(maxx, q.x);
            miny = std::min(miny, q.y);
            maxy = std::max(maxy, q.y);
        }
    if (minx > maxx) minx = maxx = miny = maxy = 0;
    const double w = (maxx - minx) * config.scale + 2 * config.margin;
    const double h = (maxy - miny) * config.scale + 2 * config.margin;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
       << "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(w) << "\" height=\""
       << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n"
       << "<!-- selfsim " << config.version << " -->\n";
    for (auto& it : items) {
        if (it.shape.vertices.empty()) continue;
        os << "<path d=\"";
        bool first = true;
        for (auto& q : it.shape.vertices) {
            double X = config.margin + (q.x - minx) * config.scale;
            double Y = config.margin + (maxy - q.y) * config.scale;
            os << (first ? "M" : " L") << fmt(X) << ' ' << fmt(Y);
            first = false;
        }
        if (it.shape.closed) os << " Z";
        os << "\" fill=\"";
        if (it.color >= 0 && !config.palette.empty())
            os << config.palette[static_cast<std::size_t>(it.color) % config.palette.size()] << "\" fill-opacity=\"0.5";
        else
            os << "none";
        os << "\" stroke=\"#000000\" stroke-width=\"" << fmt(config.stroke_width) << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string placements_to_json(const std::vector<TilePlacement>& placements) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto& p : placements) {
        nlohmann::ordered_json j;
        j["type"] = {p.type.first, p.type.second};
        j["translation"] = {p.translation.real(), p.translation.imag()};
        j["level"] = p.level;
        arr.push_back(j);
    }
    return arr.dump();
}

}  // namespace selfsim
