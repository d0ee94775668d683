#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/free_group.hpp"
#include "selfsim/geometry.hpp"

namespace selfsim {

struct Polyline {
    std::vector<Vec2> vertices;
    /// Closing segment last -> first is implicit.
    bool closed = false;
};

std::vector<std::complex<double>> generator_vectors(std::complex<double> lambda, int n);

/// Path from the origin with one segment per letter. A path returning to the
/// origin (within 1e-9 of its scale) is stored closed, without the repeated origin.
Polyline word_to_path(const Word& w, const std::vector<std::complex<double>>& gen_vectors);
std::complex<double> word_endpoint(const Word& w, const std::vector<std::complex<double>>& gen_vectors);

/// Shoelace value of a closed polyline; positive is counterclockwise.
double signed_area(const Polyline& p);

/// Reduced word phi^k(x).
Word iterate_endo(const Endomorphism& phi, Word x, int k);

/// f(phi^k([a_i, a_j])) scaled by lambda^-k. Throws MathRefusal when phi is
/// not consistent with lambda (consistency_check fails).
Polyline boundary_approx(const Endomorphism& phi, std::pair<int, int> pair, int k, std::complex<double> lambda);

struct TilePlacement {
    std::pair<int, int> type;
    std::complex<double> translation;
    int level = 0;
};

/// One placement per factor of the decomposition of phi([a_i, a_j]), translated
/// by the endpoint of f(conjugator). Throws NegativeExponentError.
std::vector<TilePlacement> subdivision_layout(const Endomorphism& phi, std::pair<int, int> pair,
                                              std::complex<double> lambda, int level = 0);

/// Closed parallelogram f([a_i, a_j]) translated by t.
Polyline tile_shape(std::pair<int, int> pair, const std::vector<std::complex<double>>& gen_vectors,
                    std::complex<double> t = 0);

/// Symmetric Hausdorff distance; each polyline is densified to spacing <= step
/// and distances are taken to the exact segments of the other one.
double hausdorff_distance(const Polyline& a, const Polyline& b, double step = 1e-3);

/// No two non-adjacent segments share a point, adjacent segments meet only at
/// their common vertex. Exact predicates on the stored coordinates.
bool simplicity_check(const Polyline& p);

struct RenderConfig {
    double scale = 100;
    double stroke_width = 1;
    std::vector<std::string> palette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    double margin = 10;
    std::string version = "0.1.0";
};

struct RenderItem {
    Polyline shape;
    /// Index into the palette; -1 draws an unfilled outline.
    int color = -1;
};

std::string render_svg(const std::vector<RenderItem>& items, const RenderConfig& config);

/// Translates the polylines horizontally so their bounding boxes sit side by side.
std::vector<Polyline> arrange_in_row(const std::vector<Polyline>& items, double gap);

std::string placements_to_json(const std::vector<TilePlacement>& placements);

}  // namespace selfsim
