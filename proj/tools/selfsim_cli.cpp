#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/free_group.hpp"
#include "selfsim/lattice_tiling.hpp"
#include "selfsim/number_field.hpp"
#include "selfsim/polynomial.hpp"
#include "selfsim/spectral.hpp"
#include "selfsim/tiling_render.hpp"

using namespace selfsim;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "1.0";
constexpr const char* kVersion = "0.1.0";

struct Options {
    double tol = 1e-9;
    int max_iter = 100000;
    int jobs = 1;
    unsigned seed = 0;
    std::string out;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json report(const std::string& cmd) {
    json j;
    j["schema_version"] = kSchema;
    j["command"] = cmd;
    return j;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

// The report goes to <out>.json when --out is set, stdout otherwise.
void emit(const Options& o, const json& j) {
    if (o.out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_file(o.out + ".json", j.dump(2) + "\n");
}

void emit_svg(const Options& o, const std::string& suffix, const std::string& svg) {
    if (!o.out.empty()) write_file(o.out + suffix + ".svg", svg);
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json coords_json(const LatticeCoords& c) {
    json a = json::array();
    for (auto x : c) a.push_back(x);
    return a;
}

// -- perron-check ----------------------------------------------------------

int cmd_perron_check(const Options& o, const std::string& text) {
    auto poly = parse_polynomial(text);
    auto cls = classify_perron(poly);
    json j = report("perron-check");
    j["polynomial"] = format_polynomial(poly);
    j["classification"] = to_string(cls);
    if (cls != PerronClass::NotAlgebraicallyValid) {
        auto roots = find_roots(poly, o.tol, o.max_iter);
        json r = json::array();
        for (auto& e : roots) r.push_back({{"value", complex_json(e.value)}, {"error_radius", e.error_radius}});
        j["roots"] = r;
    }
    bool ok = cls == PerronClass::RealPerron || cls == PerronClass::ComplexPerron;
    if (ok) {
        auto ctx = FieldContext::build(poly);
        j["lambda"] = complex_json(ctx.lambda());
        j["abs_lambda"] = ctx.lambda_abs();
        j["abs_lambda_sq"] = ctx.lambda_abs() * ctx.lambda_abs();
    }
    emit(o, j);
    return ok ? 0 : 1;
}

// -- tile-endo ---------------------------------------------------------------

int cmd_tile_endo(const Options& o, const std::vector<int>& npqr, const std::string& endo_file, int k) {
    Endomorphism phi;
    if (!endo_file.empty()) {
        std::ifstream f(endo_file);
        if (!f) throw IoError("cannot read " + endo_file);
        std::stringstream ss;
        ss << f.rdbuf();
        phi = parse_endomorphism_json(ss.str());
    } else {
        phi = standard_endo(npqr[0], npqr[1], npqr[2], npqr[3]);
    }
    auto sd = endo_subdivision(phi);
    // The polynomial always comes from the abelianization, never from the label.
    auto A = abelianization_matrix(phi);
    auto poly = characteristic_polynomial(A);
    auto ctx = FieldContext::build(poly);
    auto lambda = ctx.lambda();
    auto cons = consistency_check(phi, ctx, o.tol);
    if (!cons.pass) throw MathRefusal("endomorphism is not consistent with lambda (max residual " +
                                      std::to_string(*std::max_element(cons.residuals.begin(), cons.residuals.end())) +
                                      ")");
    auto pe = perron_eigen(sd.matrix, std::min(o.tol, 1e-12), o.max_iter);
    auto gens = generator_vectors(lambda, phi.n);
    std::vector<double> areas;
    for (auto pr : sd.basis) areas.push_back(std::abs(signed_area(tile_shape(pr, gens))));
    double l2 = std::norm(lambda);
    auto ac = check_area_eigenvector(sd.matrix, areas, l2, o.tol);

    json j = report("tile-endo");
    j["endomorphism"] = json::parse(endomorphism_to_json(phi));
    j["polynomial"] = format_polynomial(poly);
    j["lambda"] = complex_json(lambda);
    json basis = json::array();
    for (auto [a, b] : sd.basis) basis.push_back(pair_name(a, b));
    j["basis"] = basis;
    j["subdivision_matrix"] = sd.matrix;
    j["perron_eigenvalue"] = pe.value;
    j["perron_vector"] = pe.vector;
    j["abs_lambda_sq"] = l2;
    j["area_vector"] = areas;
    j["area_residuals"] = ac.residuals;
    j["area_check"] = ac.pass;
    j["consistency_residuals"] = cons.residuals;
    j["primitive"] = is_primitive(sd.matrix);
    j["levels"] = k;

    json hd = json::array();
    json simple = json::array();
    std::vector<Polyline> curves;
    for (auto pr : sd.basis) {
        auto prev = boundary_approx(phi, pr, std::max(0, k - 1), lambda);
        auto cur = boundary_approx(phi, pr, k, lambda);
        hd.push_back(k > 0 ? hausdorff_distance(prev, cur) : 0.0);
        simple.push_back(simplicity_check(cur));
        curves.push_back(cur);
    }
    j["hausdorff_last_step"] = hd;
    j["simple"] = simple;

    json layouts = json::array();
    std::vector<RenderItem> layout_items;
    std::vector<Polyline> groups;
    for (std::size_t t = 0; t < sd.basis.size(); ++t) {
        auto pl = subdivision_layout(phi, sd.basis[t], lambda);
        layouts.push_back(json::parse(placements_to_json(pl)));
        auto outer = tile_shape(sd.basis[t], gens);
        for (auto& v : outer.vertices) {
            auto z = lambda * std::complex<double>(v.x, v.y);
            v = {z.real(), z.imag()};
        }
        groups.push_back(outer);
    }
    j["layouts"] = layouts;

    if (!o.out.empty()) {
        RenderConfig cfg;
        cfg.version = kVersion;
        cfg.scale = 60;
        std::vector<RenderItem> items;
        auto row = arrange_in_row(curves, 0.5);
        for (std::size_t i = 0; i < row.size(); ++i) items.push_back({row[i], static_cast<int>(i)});
        emit_svg(o, "_boundary", render_svg(items, cfg));

        // Layout: each scaled tile outlined, its pieces filled by type, side by side.
        auto placed = arrange_in_row(groups, 1.0);
        for (std::size_t t = 0; t < sd.basis.size(); ++t) {
            Vec2 shift{placed[t].vertices[0].x - groups[t].vertices[0].x,
                       placed[t].vertices[0].y - groups[t].vertices[0].y};
            for (auto& p : subdivision_layout(phi, sd.basis[t], lambda)) {
                auto s = tile_shape(p.type, gens, p.translation);
                for (auto& v : s.vertices) v = {v.x + shift.x, v.y + shift.y};
                int c = static_cast<int>(std::find(sd.basis.begin(), sd.basis.end(), p.type) - sd.basis.begin());
                layout_items.push_back({s, c});
            }
            layout_items.push_back({placed[t], -1});
        }
        emit_svg(o, "_layout", render_svg(layout_items, cfg));
    }
    emit(o, j);
    return 0;
}

// -- lattice / grow ------------------------------------------------------------

struct LatticeSetup {
    FieldContext ctx;
    std::vector<LatticeCoords> T0;
    std::vector<LatticeTriangle> annulus;
    ConstructionConstants consts;
};

LatticeSetup lattice_setup(const std::string& text, std::optional<int> symmetric) {
    auto ctx = FieldContext::build(parse_polynomial(text));
    if (ctx.is_real_lambda())
        throw MathRefusal("real Perron expansion: the lattice construction here covers nonreal lambda only");
    auto T0 = build_T0(ctx, symmetric);
    auto annulus = triangulate_annulus(ctx, T0);
    auto consts = compute_constants(ctx, T0, annulus);
    return {std::move(ctx), std::move(T0), std::move(annulus), consts};
}

std::string patch_svg(const FieldContext& ctx, const PatchTiling& patch, const std::vector<LatticeCoords>& T0) {
    std::vector<RenderItem> items;
    for (std::size_t i = 0; i < patch.triangles.size(); ++i) {
        auto p = planar(ctx, patch.triangle(i));
        items.push_back({Polyline{{p[0], p[1], p[2]}, true}, (patch.triangles[i].label - 1) % 6});
    }
    for (auto& off : patch.central_tiles) {
        Polyline pl;
        pl.closed = true;
        for (auto& v : T0) {
            LatticeCoords w = v;
            for (std::size_t i = 0; i < w.size(); ++i) w[i] += off[i];
            pl.vertices.push_back(ctx.planar(w));
        }
        items.push_back({pl, -1});
    }
    double extent = 1;
    for (auto& it : items)
        for (auto& v : it.shape.vertices) extent = std::max({extent, std::abs(v.x), std::abs(v.y)});
    RenderConfig cfg;
    cfg.version = kVersion;
    cfg.scale = 800 / (2 * extent);
    cfg.stroke_width = 0.5;
    return render_svg(items, cfg);
}

json growth_json(const GrowthReport& r) {
    json j;
    j["labels_ok"] = r.labels_ok;
    j["overlap_free"] = r.overlap_free;
    j["cover_residual"] = r.cover_residual ? json(*r.cover_residual) : json(nullptr);
    j["label_histogram"] = r.label_histogram;
    return j;
}

json subdivision_json(const SubdivisionResult& s, const ConstructionConstants& c, double lambda_abs) {
    json j;
    j["triangles"] = s.triangles.size();
    j["gap_triangles"] = std::count(s.gap.begin(), s.gap.end(), 1);
    j["central_offset"] = s.central_offset ? coords_json(*s.central_offset) : json(nullptr);
    j["max_edge"] = s.max_edge;
    j["max_edge_regular"] = s.max_edge_regular;
    j["edge_bound"] = c.M / lambda_abs;
    j["max_vertical_edge"] = s.max_vertical_edge;
    j["all_in_T"] = s.all_in_T;
    j["all_scaled_in_T"] = s.all_scaled_in_T;
    j["cover_residual"] = s.cover_residual ? json(s.cover_residual->get_str()) : json(nullptr);
    j["overlap_free"] = s.overlap_free;
    j["covers_center"] = s.covers_center;
    return j;
}

int run_growth(const Options& o, const std::string& cmd, const std::string& text, int generations,
               std::optional<int> symmetric, std::optional<int> n_override, std::optional<double> r2_override, bool subdivide, std::size_t cap) {
    if (generations < 0) throw std::invalid_argument("generations must be >= 0");
    auto s = lattice_setup(text, symmetric);
    json j = report(cmd);
    j["polynomial"] = format_polynomial(s.ctx.poly());
    j["lambda"] = complex_json(s.ctx.lambda());
    json t0 = json::array();
    for (auto& v : s.T0) t0.push_back(coords_json(v));
    j["T0"] = t0;
    j["annulus_triangles"] = s.annulus.size();
    j["constants"] = json::parse(constants_to_json(s.consts));
    auto consts = s.consts;
    if (n_override) {
        if (*n_override < 1) throw std::invalid_argument("--n must be >= 1");
        consts.n = *n_override;
        j["n_override"] = *n_override;
    }
    if (r2_override) {
        if (*r2_override <= 0) throw std::invalid_argument("--r2 must be positive");
        consts.r2 = *r2_override;
        j["r2_override"] = *r2_override;
    }
    if (n_override || r2_override)
        j["override_note"] = "constants replaced by hand; invariants are checked, not guaranteed";

    if (subdivide) {
        // A surrounding of one annulus triangle (picked by the seed) and one of its neighbor.
        std::mt19937 rng(o.seed);
        std::size_t pick = std::uniform_int_distribution<std::size_t>(0, s.annulus.size() - 1)(rng);
        Surrounding X1{s.annulus[pick], {}};
        auto sub = subdivide_surrounding(s.ctx, consts, s.T0, X1, true);
        json sj = subdivision_json(sub, consts, s.ctx.lambda_abs());
        sj["center_index"] = pick;
        std::optional<std::size_t> nb;
        for (std::size_t i = 0; i < s.annulus.size() && !nb; ++i) {
            if (i == pick) continue;
            int shared = 0;
            for (auto& a : s.annulus[i].v)
                for (auto& b : s.annulus[pick].v) shared += a == b;
            if (shared == 2) nb = i;
        }
        if (nb) {
            Surrounding X2{s.annulus[*nb], {}};
            X1.ring = {s.annulus[*nb]};
            X2.ring = {s.annulus[pick]};
            auto ov = overlap_agreement(s.ctx, consts, s.T0, X1, X2);
            sj["overlap"] = {{"neighbor_index", *nb}, {"pass", ov.pass}, {"vacuous", ov.vacuous},
                             {"compared", ov.compared}, {"mismatched", ov.mismatched}};
        }
        j["subdivision"] = sj;
    }

    if (s.ctx.degree() != 2 && generations > 0)
        throw MathRefusal("patch growth is implemented for quadratic fields only");
    auto patch = grow_tiling(s.ctx, consts, s.T0, s.annulus, generations, cap, o.jobs);
    auto rep = check_patch(s.ctx, patch, s.T0);
    j["generations"] = generations;
    j["patch_triangles"] = patch.triangles.size();
    j["central_tiles"] = patch.central_tiles.size();
    j["subdivided"] = patch.subdivided;
    j["invariants"] = growth_json(rep);
    if (!o.out.empty()) {
        write_file(o.out + "_patch.json", patch_to_json(s.ctx, patch) + "\n");
        emit_svg(o, "_patch", patch_svg(s.ctx, patch, s.T0));
    }
    emit(o, j);
    return 0;
}

// -- refine-boundary -------------------------------------------------------------

int cmd_refine_boundary(const Options& o, const std::string& text, int levels, int tri) {
    auto s = lattice_setup(text, std::nullopt);
    if (tri < 0 || tri >= static_cast<int>(s.annulus.size()))
        throw std::invalid_argument("--triangle out of range (annulus has " + std::to_string(s.annulus.size()) +
                                    ")");
    auto t = s.annulus[tri];
    auto br = refine_boundary(s.ctx, s.consts, s.T0, t, levels);
    json j = report("refine-boundary");
    j["polynomial"] = format_polynomial(s.ctx.poly());
    j["triangle_index"] = tri;
    json tv = json::array();
    for (auto& v : t.v) tv.push_back(coords_json(v));
    j["triangle"] = tv;
    j["levels"] = levels;
    json sizes = json::array();
    for (auto& c : br.curves) sizes.push_back(c.vertices.size());
    j["curve_vertices"] = sizes;
    j["hausdorff"] = br.hausdorff;
    j["fitted_constant"] = br.fitted_constant;
    j["simple"] = br.simple;
    if (!o.out.empty()) {
        auto p = planar(s.ctx, t);
        // Last curve filled, earlier ones and the triangle as outlines on top of it.
        std::vector<RenderItem> items{{br.curves.back(), 0}};
        for (std::size_t i = 0; i + 1 < br.curves.size(); ++i) items.push_back({br.curves[i], -1});
        items.push_back({Polyline{{p[0], p[1], p[2]}, true}, -1});
        RenderConfig cfg;
        cfg.version = kVersion;
        cfg.scale = 60;
        cfg.stroke_width = 0.3;
        emit_svg(o, "_boundary", render_svg(items, cfg));
    }
    emit(o, j);
    return 0;
}

// -- zeta ------------------------------------------------------------------------

int cmd_zeta(const Options& o, const std::string& text, int m, bool require) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    auto ctx = FieldContext::build(parse_polynomial(text));
    auto z = cyclotomic_in_field(ctx, m);
    json j = report("zeta");
    j["polynomial"] = format_polynomial(ctx.poly());
    j["m"] = m;
    j["present"] = z.has_value();
    if (z) {
        json c = json::array();
        for (auto& q : z->coeffs) c.push_back(q.get_str());
        j["coefficients"] = c;
        j["integral"] = z->is_integral();
    }
    emit(o, j);
    return (require && !z) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"selfsim: self-similar tilings with a prescribed expansion"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--tol", o.tol, "numeric tolerance")->check(CLI::PositiveNumber);
    app.add_option("--max-iter", o.max_iter, "iteration cap")->check(CLI::PositiveNumber);
    app.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--out", o.out, "output prefix; reports go to stdout when absent");

    std::string poly;
    auto* pc = app.add_subcommand("perron-check", "classify a polynomial");
    pc->add_option("poly", poly, "coefficients, lowest degree first")->required();

    std::vector<int> npqr;
    std::string endo_file;
    int k = 6;
    auto* te = app.add_subcommand("tile-endo", "tiles from a free group endomorphism");
    auto* te_std = te->add_option("--std", npqr, "n,p,q,r of the standard endomorphism")->expected(4)->delimiter(',');
    auto* te_file = te->add_option("--endo", endo_file, "endomorphism JSON file");
    te_std->excludes(te_file);
    te->add_option("-k,--levels", k, "approximant level")->check(CLI::NonNegativeNumber);

    int generations = 0;
    std::optional<int> symmetric, n_override;
    std::optional<double> r2_override;
    bool subdivide = false;
    std::size_t cap = 8'000'000;
    auto* la = app.add_subcommand("lattice", "T0, constants and a size-labeled patch");
    la->add_option("poly", poly)->required();
    la->add_option("-g,--generations", generations)->check(CLI::NonNegativeNumber);
    la->add_option("--symmetric", symmetric, "rotation order of T0");
    la->add_flag("--subdivide", subdivide, "also subdivide one surrounding and check overlap agreement");

    auto* gr = app.add_subcommand("grow", "grow a patch, optionally with a smaller exponent");
    gr->add_option("poly", poly)->required();
    gr->add_option("-g,--generations", generations)->required()->check(CLI::NonNegativeNumber);
    gr->add_option("--n", n_override, "override the exponent parameter n");
    gr->add_option("--r2", r2_override, "override the edge zone radius r2");
    gr->add_option("--max-triangles", cap);

    int levels = 1, tri = 0;
    auto* rb = app.add_subcommand("refine-boundary", "redrawn boundary curves of an annulus triangle");
    rb->add_option("poly", poly)->required();
    rb->add_option("-k,--levels", levels);
    rb->add_option("--triangle", tri, "annulus triangle index");

    int m = 0;
    bool require = false;
    auto* ze = app.add_subcommand("zeta", "exp(2 pi i/m) in Q[lambda]");
    ze->add_option("poly", poly)->required();
    ze->add_option("m", m)->required();
    ze->add_flag("--require", require, "exit 1 when absent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*pc) return cmd_perron_check(o, poly);
        if (*te) {
            if (npqr.empty() == endo_file.empty()) throw std::invalid_argument("give exactly one of --std, --endo");
            return cmd_tile_endo(o, npqr, endo_file, k);
        }
        if (*la) return run_growth(o, "lattice", poly, generations, symmetric, std::nullopt, std::nullopt, subdivide, cap);
        if (*gr) return run_growth(o, "grow", poly, generations, std::nullopt, n_override, r2_override, false, cap);
        if (*rb) return cmd_refine_boundary(o, poly, levels, tri);
        if (*ze) return cmd_zeta(o, poly, m, require);
    } catch (const NegativeExponentError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const NotPerronError& e) {
        std::cerr << "NotPerron: " << e.what() << "\n";
        return 1;
    } catch (const MathRefusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 1;
    } catch (const ConstructionError& e) {
        std::cerr << "construction bound failed: " << e.what() << "\n";
        return 1;
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
