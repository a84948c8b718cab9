#include "flexslice/pathgen.hpp"

#include "flexslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

namespace flexslice {

std::string_view to_string(PathRole role)
{
    switch (role) {
    case PathRole::outer_perimeter: return "outer_perimeter";
    case PathRole::inner_perimeter: return "inner_perimeter";
    case PathRole::infill: return "infill";
    case PathRole::bridge: return "bridge";
    case PathRole::support: return "support";
    case PathRole::travel: return "travel";
    }
    return "unknown";
}

double ToolPath::length() const
{
    double l = 0.;
    for (std::size_t i = 1; i < points.size(); ++i)
        l += distance(points[i - 1], points[i]);
    if (closed && points.size() > 2)
        l += distance(points.back(), points.front());
    return l;
}

std::string check_toolpath(const ToolPath& path, double nozzle_diameter)
{
    if (path.points.size() < 2)
        return "path has fewer than 2 points";
    if (path.extrudes() && (path.width < 0.5 * nozzle_diameter - 1e-9 || path.width > 3. * nozzle_diameter + 1e-9)) {
        std::ostringstream s;
        s << to_string(path.role) << " width " << path.width << " outside [0.5, 3] x nozzle " << nozzle_diameter;
        return s.str();
    }
    return {};
}

// ---------------------------------------------------------------------------
// Perimeters and infill

namespace {

// Rotates the ring so it starts at the rear-most vertex.
std::vector<Vec2> seam_at_rear(std::vector<Vec2> pts)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec2 p = pts[i], b = pts[best];
        if (p.y > b.y + 1e-9 || (std::abs(p.y - b.y) <= 1e-9 && p.x < b.x))
            best = i;
    }
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(best), pts.end());
    return pts;
}

} // namespace

std::vector<ToolPath> generate_perimeters(const LayerSlice& layer, int count, double width)
{
    if (count < 1)
        throw ConfigError("perimeter count must be at least 1");
    if (!(width > 0.))
        throw ConfigError("extrusion width must be positive");

    std::vector<ToolPath> paths;
    const auto            islands = split_islands(layer.contours);
    for (std::size_t isl = 0; isl < islands.size(); ++isl) {
        for (int k = 0; k < count; ++k) {
            const auto loops = offset_contours(islands[isl], -(k + 0.5) * width);
            if (loops.empty())
                break;
            for (const Contour& c : loops) {
                ToolPath p;
                p.points      = seam_at_rear(c.points);
                p.role        = k == 0 ? PathRole::outer_perimeter : PathRole::inner_perimeter;
                p.width       = width;
                p.layer_index = layer.index;
                p.closed      = true;
                p.island      = static_cast<int>(isl);
                paths.push_back(std::move(p));
            }
        }
    }
    return paths;
}

std::vector<Contour> infill_area(std::span<const Contour> region, int count, double width)
{
    return offset_contours(region, -count * width);
}

std::vector<ToolPath> generate_infill(std::span<const Contour> region, double density, double angle_deg, double width,
                                      int layer_index, PathRole role)
{
    if (!(density >= 0. && density <= 1.))
        throw ConfigError("infill density must be within [0, 1]");
    if (!(width > 0.))
        throw ConfigError("extrusion width must be positive");
    if (density == 0. || region.empty())
        return {};

    const double theta = deg_to_rad(angle_deg);
    const Vec2   u { std::cos(theta), std::sin(theta) };
    const Vec2   n { -u.y, u.x };

    // Work in a frame where the lines are horizontal.
    std::vector<std::vector<Vec2>> rings;
    double                         vmin = INFINITY, vmax = -INFINITY;
    for (const Contour& c : region) {
        auto& r = rings.emplace_back();
        for (Vec2 p : c.points) {
            r.push_back({ dot(p, u), dot(p, n) });
            vmin = std::min(vmin, r.back().y);
            vmax = std::max(vmax, r.back().y);
        }
    }
    const double extent = vmax - vmin;
    if (!(extent > 0.))
        return {};

    // First and last line sit width/2 inside the extent; the gaps are spread
    // evenly and never drop below one width.
    const double      spacing = width / density;
    std::vector<double> levels;
    if (extent <= width) {
        levels.push_back(0.5 * (vmin + vmax));
    } else {
        const double span  = extent - width;
        const long   by_spacing = static_cast<long>(std::ceil(span / spacing - 1e-9));
        const long   by_width   = static_cast<long>(std::floor(span / width + 1e-9));
        const long   gaps       = std::max(0L, std::min(by_spacing, by_width));
        if (gaps == 0)
            levels.push_back(0.5 * (vmin + vmax));
        else
            for (long k = 0; k <= gaps; ++k)
                levels.push_back(vmin + 0.5 * width + span * static_cast<double>(k) / static_cast<double>(gaps));
    }

    // Lines are clipped a quarter width inside the region and trimmed by
    // another quarter at their ends, so no centreline comes closer than three
    // quarters of a width to the perimeter that bounds the region.
    rings.clear();
    for (const Contour& c : offset_contours(region, -0.25 * width)) {
        auto& r = rings.emplace_back();
        for (Vec2 p : c.points)
            r.push_back({ dot(p, u), dot(p, n) });
    }

    std::vector<ToolPath> paths;
    bool                  flip = false;
    for (double c : levels) {
        std::vector<double> xs;
        for (const auto& r : rings)
            for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
                const Vec2 a = r[j], b = r[i];
                if ((a.y > c) != (b.y > c))
                    xs.push_back(a.x + (c - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const double x0 = xs[k] + 0.25 * width;
            const double x1 = xs[k + 1] - 0.25 * width;
            if (x1 - x0 < 1e-6)
                continue;
            ToolPath p;
            Vec2     a = u * x0 + n * c, b = u * x1 + n * c;
            if (flip)
                std::swap(a, b);
            p.points      = { a, b };
            p.role        = role;
            p.width       = width;
            p.layer_index = layer_index;
            paths.push_back(std::move(p));
        }
        flip = !flip;
    }
    return paths;
}

// ---------------------------------------------------------------------------
// Bridge detection

namespace {

// Sorted crossing abscissae of a horizontal line with a region.
std::vector<double> row_crossings(std::span<const Contour> region, double y)
{
    std::vector<double> xs;
    for (const Contour& c : region) {
        const auto& r = c.points;
        for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
            const Vec2 a = r[j], b = r[i];
            if ((a.y > y) != (b.y > y))
                xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

bool inside_crossings(const std::vector<double>& xs, double x)
{
    const auto k = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    return k % 2 == 1;
}

struct IVec
{
    long x, y;
    auto operator<=>(const IVec&) const = default;
};

// Boundary loops of a set of grid cells. Interior stays on the left, so outer
// loops come out counter-clockwise and holes clockwise.
std::vector<std::vector<Vec2>> trace_cells(const std::vector<IVec>& cells, double grid)
{
    std::map<IVec, bool> occupied;
    for (IVec c : cells)
        occupied[c] = true;
    auto has = [&](long x, long y) { return occupied.count({ x, y }) > 0; };

    std::multimap<IVec, IVec> edges;
    for (IVec c : cells) {
        const long i = c.x, j = c.y;
        if (!has(i, j - 1)) edges.insert({ { i, j }, { i + 1, j } });
        if (!has(i + 1, j)) edges.insert({ { i + 1, j }, { i + 1, j + 1 } });
        if (!has(i, j + 1)) edges.insert({ { i + 1, j + 1 }, { i, j + 1 } });
        if (!has(i - 1, j)) edges.insert({ { i, j + 1 }, { i, j } });
    }

    std::vector<std::vector<Vec2>> loops;
    while (!edges.empty()) {
        auto              first = edges.begin();
        const IVec        start = first->first;
        IVec              prev  = start;
        IVec              cur   = first->second;
        edges.erase(first);
        std::vector<IVec> loop { start };
        while (!(cur == start)) {
            loop.push_back(cur);
            auto [lo, hi] = edges.equal_range(cur);
            if (lo == hi)
                break;
            // Prefer the leftmost turn so diagonal pinches split into separate loops.
            const IVec din { cur.x - prev.x, cur.y - prev.y };
            auto       best      = lo;
            int        best_rank = 3;
            for (auto it = lo; it != hi; ++it) {
                const IVec dout { it->second.x - cur.x, it->second.y - cur.y };
                const long cr   = din.x * dout.y - din.y * dout.x;
                const int  rank = cr > 0 ? 0 : (cr == 0 ? 1 : 2);
                if (rank < best_rank) {
                    best_rank = rank;
                    best      = it;
                }
            }
            prev = cur;
            cur  = best->second;
            edges.erase(best);
        }
        std::vector<Vec2> pts;
        pts.reserve(loop.size());
        for (IVec v : loop)
            pts.push_back({ static_cast<double>(v.x) * grid, static_cast<double>(v.y) * grid });
        loops.push_back(std::move(pts));
    }
    return loops;
}

} // namespace

std::vector<BridgeRegion> detect_bridges(const LayerSlice& layer, const LayerSlice& below, double grid)
{
    if (layer.contours.empty())
        return {};
    const BoundingBox2 bb = bounding_box(layer.contours);
    const long         i0 = static_cast<long>(std::floor(bb.min.x / grid)) - 1;
    const long         i1 = static_cast<long>(std::ceil(bb.max.x / grid)) + 1;
    const long         j0 = static_cast<long>(std::floor(bb.min.y / grid)) - 1;
    const long         j1 = static_cast<long>(std::ceil(bb.max.y / grid)) + 1;
    const long         nx = i1 - i0, ny = j1 - j0;

    std::vector<std::uint8_t> mark(static_cast<std::size_t>(nx * ny), 0);
    for (long j = 0; j < ny; ++j) {
        const double yc   = (static_cast<double>(j + j0) + 0.5) * grid;
        const auto   cur  = row_crossings(layer.contours, yc);
        if (cur.empty())
            continue;
        const auto   prev = row_crossings(below.contours, yc);
        for (long i = 0; i < nx; ++i) {
            const double xc = (static_cast<double>(i + i0) + 0.5) * grid;
            if (inside_crossings(cur, xc) && !inside_crossings(prev, xc))
                mark[static_cast<std::size_t>(j * nx + i)] = 1;
        }
    }

    std::vector<BridgeRegion> out;
    for (long s = 0; s < nx * ny; ++s) {
        if (mark[static_cast<std::size_t>(s)] != 1)
            continue;
        // 4-connected flood fill.
        std::vector<IVec> cells;
        std::deque<long>  queue { s };
        mark[static_cast<std::size_t>(s)] = 2;
        while (!queue.empty()) {
            const long q = queue.front();
            queue.pop_front();
            const long i = q % nx, j = q / nx;
            cells.push_back({ i + i0, j + j0 });
            const long nb[4][2] = { { i - 1, j }, { i + 1, j }, { i, j - 1 }, { i, j + 1 } };
            for (const auto& v : nb) {
                if (v[0] < 0 || v[0] >= nx || v[1] < 0 || v[1] >= ny)
                    continue;
                const long k = v[1] * nx + v[0];
                if (mark[static_cast<std::size_t>(k)] == 1) {
                    mark[static_cast<std::size_t>(k)] = 2;
                    queue.push_back(k);
                }
            }
        }

        std::vector<Vec2> corners;
        corners.reserve(cells.size() * 4);
        for (IVec c : cells) {
            const double x = static_cast<double>(c.x) * grid, y = static_cast<double>(c.y) * grid;
            corners.insert(corners.end(), { { x, y }, { x + grid, y }, { x + grid, y + grid }, { x, y + grid } });
        }
        const OrientedBox box = min_area_rectangle(corners);
        if (box.short_side < 2. * grid - 1e-9)
            continue;

        BridgeRegion r;
        std::sort(cells.begin(), cells.end());
        r.contours   = normalize_loops(trace_cells(cells, grid));
        r.max_span   = box.long_side;
        r.min_span   = box.short_side;
        r.long_angle = box.long_angle;
        r.center     = box.center;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::vector<BridgeRegion>> detect_all_bridges(std::span<const LayerSlice> layers, double grid)
{
    std::vector<std::vector<BridgeRegion>> out(layers.size());
    for (std::size_t i = 1; i < layers.size(); ++i)
        out[i] = detect_bridges(layers[i], layers[i - 1], grid);
    return out;
}

// ---------------------------------------------------------------------------
// Ordering

namespace {

ToolPath reversed(ToolPath p)
{
    std::reverse(p.points.begin(), p.points.end());
    return p;
}

// Paths of one island in print order.
struct Cluster
{
    std::vector<ToolPath> paths;
    Vec2 entry() const { return paths.front().start(); }
    Vec2 exit() const { return paths.back().end(); }
};

// Outer perimeters, inner perimeters, then everything else; greedy nearest
// neighbour inside each group. Open paths may be reversed.
Cluster build_cluster(std::vector<ToolPath> members)
{
    std::vector<ToolPath> outer, inner, rest;
    for (auto& p : members)
        (p.role == PathRole::outer_perimeter ? outer : p.role == PathRole::inner_perimeter ? inner : rest)
            .push_back(std::move(p));

    Cluster c;
    bool    have_pos = false;
    Vec2    pos;
    for (auto* group : { &outer, &inner, &rest }) {
        std::vector<bool> used(group->size(), false);
        for (std::size_t taken = 0; taken < group->size(); ++taken) {
            std::size_t best     = 0;
            bool        best_rev = false;
            double      best_d   = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < group->size(); ++i) {
                if (used[i])
                    continue;
                const ToolPath& p = (*group)[i];
                if (!have_pos) {
                    best = i;
                    break;
                }
                const double ds = distance(pos, p.start());
                if (ds < best_d - 1e-12) {
                    best_d   = ds;
                    best     = i;
                    best_rev = false;
                }
                if (!p.closed) {
                    const double de = distance(pos, p.points.back());
                    if (de < best_d - 1e-12) {
                        best_d   = de;
                        best     = i;
                        best_rev = true;
                    }
                }
            }
            used[best] = true;
            c.paths.push_back(best_rev ? reversed((*group)[best]) : (*group)[best]);
            pos      = c.paths.back().end();
            have_pos = true;
        }
    }
    return c;
}

double sequence_cost(const std::vector<Cluster>& cl, const std::vector<std::size_t>& seq, Vec2 start)
{
    double cost = 0.;
    Vec2   pos  = start;
    for (std::size_t k : seq) {
        cost += distance(pos, cl[k].entry());
        pos = cl[k].exit();
    }
    return cost;
}

// Exact open-path optimum from a fixed start (Held-Karp).
std::vector<std::size_t> exact_order(const std::vector<Cluster>& cl, Vec2 start)
{
    const std::size_t n    = cl.size();
    const std::size_t full = (std::size_t { 1 } << n);
    constexpr double  inf  = std::numeric_limits<double>::infinity();
    std::vector<double>      dp(full * n, inf);
    std::vector<std::size_t> parent(full * n, n);
    for (std::size_t i = 0; i < n; ++i)
        dp[(std::size_t { 1 } << i) * n + i] = distance(start, cl[i].entry());
    for (std::size_t mask = 1; mask < full; ++mask)
        for (std::size_t last = 0; last < n; ++last) {
            const double base = dp[mask * n + last];
            if (!(mask >> last & 1) || base == inf)
                continue;
            for (std::size_t nx = 0; nx < n; ++nx) {
                if (mask >> nx & 1)
                    continue;
                const std::size_t m2 = mask | (std::size_t { 1 } << nx);
                const double      v  = base + distance(cl[last].exit(), cl[nx].entry());
                if (v < dp[m2 * n + nx] - 1e-12) {
                    dp[m2 * n + nx]     = v;
                    parent[m2 * n + nx] = last;
                }
            }
        }
    std::size_t last = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (dp[(full - 1) * n + i] < dp[(full - 1) * n + last] - 1e-12)
            last = i;
    std::vector<std::size_t> seq;
    std::size_t              mask = full - 1;
    while (last < n) {
        seq.push_back(last);
        const std::size_t p = parent[mask * n + last];
        mask &= ~(std::size_t { 1 } << last);
        last = p;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
}

std::vector<std::size_t> greedy_order(const std::vector<Cluster>& cl, Vec2 start)
{
    std::vector<std::size_t> seq;
    std::vector<bool>        used(cl.size(), false);
    Vec2                     pos = start;
    for (std::size_t step = 0; step < cl.size(); ++step) {
        std::size_t best   = 0;
        double      best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cl.size(); ++i)
            if (!used[i] && distance(pos, cl[i].entry()) < best_d - 1e-12) {
                best_d = distance(pos, cl[i].entry());
                best   = i;
            }
        used[best] = true;
        seq.push_back(best);
        pos = cl[best].exit();
    }
    return seq;
}

// 2-opt on the visit sequence. Entries and exits differ, so each candidate
// reversal is re-costed over the span it touches.
void two_opt(const std::vector<Cluster>& cl, std::vector<std::size_t>& seq, Vec2 start)
{
    const std::size_t n = seq.size();
    auto exit_of = [&](std::size_t pos_in_seq) { return pos_in_seq == 0 ? start : cl[seq[pos_in_seq - 1]].exit(); };
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                // Links from position i-1 to j+1 before and after reversing [i, j].
                const Vec2 before_pt = exit_of(i);
                double     old_cost  = 0., new_cost = 0.;
                Vec2       pos       = before_pt;
                for (std::size_t k = i; k <= j; ++k) {
                    old_cost += distance(pos, cl[seq[k]].entry());
                    pos = cl[seq[k]].exit();
                }
                if (j + 1 < n)
                    old_cost += distance(pos, cl[seq[j + 1]].entry());
                pos = before_pt;
                for (std::size_t k = j + 1; k-- > i;) {
                    new_cost += distance(pos, cl[seq[k]].entry());
                    pos = cl[seq[k]].exit();
                }
                if (j + 1 < n)
                    new_cost += distance(pos, cl[seq[j + 1]].entry());
                if (new_cost < old_cost - 1e-9) {
                    std::reverse(seq.begin() + static_cast<std::ptrdiff_t>(i),
                                 seq.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                    improved = true;
                }
            }
    }
}

bool respects_island_order(std::span<const ToolPath> paths)
{
    std::map<int, int> stage; // 0 outer, 1 inner, 2 other
    for (const ToolPath& p : paths) {
        if (p.island < 0)
            continue;
        const int s = p.role == PathRole::outer_perimeter ? 0 : p.role == PathRole::inner_perimeter ? 1 : 2;
        int&      cur = stage.try_emplace(p.island, s).first->second;
        if (s < cur)
            return false;
        cur = s;
    }
    return true;
}

std::vector<ToolPath> with_travel(std::vector<ToolPath> paths, Vec2 start)
{
    std::vector<ToolPath> out;
    out.reserve(paths.size() * 2);
    Vec2 pos = start;
    for (ToolPath& p : paths) {
        if (distance(pos, p.start()) > 0.) {
            ToolPath t;
            t.points      = { pos, p.start() };
            t.role        = PathRole::travel;
            t.layer_index = p.layer_index;
            t.island      = p.island;
            out.push_back(std::move(t));
        }
        pos = p.end();
        out.push_back(std::move(p));
    }
    return out;
}

constexpr std::size_t kExactOrderLimit = 10;

} // namespace

std::vector<ToolPath> order_paths(std::vector<ToolPath> paths, Vec2 start)
{
    std::erase_if(paths, [](const ToolPath& p) { return !p.extrudes() || p.points.size() < 2; });
    if (paths.empty())
        return {};

    std::vector<Cluster>     clusters;
    std::map<int, std::size_t> by_island;
    {
        std::vector<std::vector<ToolPath>> members;
        for (ToolPath& p : paths) {
            if (p.island >= 0) {
                auto [it, fresh] = by_island.try_emplace(p.island, members.size());
                if (fresh)
                    members.emplace_back();
                members[it->second].push_back(p);
            } else {
                members.push_back({ p });
            }
        }
        for (auto& m : members)
            clusters.push_back(build_cluster(std::move(m)));
    }

    std::vector<std::size_t> seq;
    if (clusters.size() <= kExactOrderLimit) {
        seq = exact_order(clusters, start);
    } else {
        seq = greedy_order(clusters, start);
        two_opt(clusters, seq, start);
        std::vector<std::size_t> natural(clusters.size());
        for (std::size_t i = 0; i < natural.size(); ++i)
            natural[i] = i;
        if (sequence_cost(clusters, natural, start) < sequence_cost(clusters, seq, start)) {
            two_opt(clusters, natural, start);
            seq = std::move(natural);
        }
    }

    std::vector<ToolPath> ordered;
    ordered.reserve(paths.size());
    for (std::size_t k : seq)
        for (ToolPath& p : clusters[k].paths)
            ordered.push_back(std::move(p));

    // Never worse than printing the input as given.
    if (respects_island_order(paths) && input_order_travel(paths, start) < input_order_travel(ordered, start))
        return with_travel(std::move(paths), start);
    return with_travel(std::move(ordered), start);
}

double travel_length(std::span<const ToolPath> paths)
{
    double l = 0.;
    for (const ToolPath& p : paths)
        if (!p.extrudes())
            l += p.length();
    return l;
}

double input_order_travel(std::span<const ToolPath> paths, Vec2 start)
{
    double l   = 0.;
    Vec2   pos = start;
    for (const ToolPath& p : paths) {
        if (!p.extrudes())
            continue;
        l += distance(pos, p.start());
        pos = p.end();
    }
    return l;
}

} // namespace flexslice
