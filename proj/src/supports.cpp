#include "flexslice/supports.hpp"

#include "flexslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace flexslice {

double FacetRegion::area() const
{
    double a = 0.;
    for (const Triangle& t : triangles)
        a += triangle_area(t);
    return a;
}

BoundingBox3 FacetRegion::bounding_box() const
{
    BoundingBox3 bb;
    for (const Triangle& t : triangles)
        for (const Vec3& p : t)
            bb.merge(p);
    return bb;
}

namespace {

struct DisjointSet
{
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Bucketed column centres for repeated "is anything within r" queries.
class ColumnGrid
{
public:
    explicit ColumnGrid(double cell) : m_cell(cell) {}

    void insert(Vec2 p) { m_buckets[key(p)].push_back(p); }

    bool any_within(Vec2 p, double r) const
    {
        const auto [cx, cy] = key(p);
        const long span     = static_cast<long>(std::ceil(r / m_cell));
        for (long dx = -span; dx <= span; ++dx)
            for (long dy = -span; dy <= span; ++dy) {
                auto it = m_buckets.find({ cx + dx, cy + dy });
                if (it == m_buckets.end())
                    continue;
                for (Vec2 q : it->second)
                    if (distance(p, q) <= r)
                        return true;
            }
        return false;
    }

private:
    struct Hash
    {
        std::size_t operator()(const std::pair<long, long>& k) const noexcept
        {
            return std::hash<long>()(k.first * 73856093L ^ k.second * 19349663L);
        }
    };
    std::pair<long, long> key(Vec2 p) const
    {
        return { static_cast<long>(std::floor(p.x / m_cell)), static_cast<long>(std::floor(p.y / m_cell)) };
    }

    double                                                              m_cell;
    std::unordered_map<std::pair<long, long>, std::vector<Vec2>, Hash> m_buckets;
};

} // namespace

std::vector<FacetRegion> detect_overhangs(const TriangleMesh& mesh, double threshold_deg)
{
    if (mesh.empty())
        return {};
    const double limit = -std::sin(deg_to_rad(threshold_deg));
    // Facets on the build plate (z = 0, or the lowest point of a mesh that
    // has not been placed yet) rest on the bed and need no support.
    const double bed   = std::min(0., mesh.bounding_box().min.z) + 1e-6;

    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const Triangle t = mesh.triangle(i);
        if (std::max({ t[0].z, t[1].z, t[2].z }) <= bed)
            continue;
        if (mesh.normal(i).z < limit)
            flagged.push_back(i);
    }

    DisjointSet                                                  sets(flagged.size());
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> edge_owner;
    for (std::size_t k = 0; k < flagged.size(); ++k) {
        const auto& tri = mesh.triangles[flagged[k]];
        for (int e = 0; e < 3; ++e) {
            std::uint32_t a = tri[e], b = tri[(e + 1) % 3];
            if (a > b)
                std::swap(a, b);
            auto [it, fresh] = edge_owner.try_emplace({ a, b }, k);
            if (!fresh)
                sets.unite(k, it->second);
        }
    }

    std::map<std::size_t, std::size_t> region_of_root;
    std::vector<FacetRegion>           regions;
    for (std::size_t k = 0; k < flagged.size(); ++k) {
        auto [it, fresh] = region_of_root.try_emplace(sets.find(k), regions.size());
        if (fresh)
            regions.emplace_back();
        regions[it->second].triangles.push_back(mesh.triangle(flagged[k]));
    }
    return regions;
}

std::vector<FacetRegion> detect_overhangs(const TriangleMesh& mesh, const OverhangThresholds& thresholds,
                                          Orientation mode)
{
    return detect_overhangs(mesh, thresholds.for_mode(mode));
}

std::optional<double> vertical_hit(const FacetRegion& region, Vec2 xy)
{
    constexpr double      eps = 1e-9;
    std::optional<double> best;
    for (const Triangle& t : region.triangles) {
        const Vec2   a = t[0].xy(), b = t[1].xy(), c = t[2].xy();
        const double d = cross(b - a, c - a);
        if (std::abs(d) < 1e-12)
            continue;
        const double l1 = cross(xy - a, c - a) / d;
        const double l2 = cross(b - a, xy - a) / d;
        const double l0 = 1. - l1 - l2;
        if (l0 < -eps || l1 < -eps || l2 < -eps)
            continue;
        const double z = l0 * t[0].z + l1 * t[1].z + l2 * t[2].z;
        if (!best || z < *best)
            best = z;
    }
    return best;
}

std::vector<Vec3> sample_region(const FacetRegion& region, double spacing)
{
    std::vector<Vec3> out;
    for (const Triangle& t : region.triangles) {
        const double longest = std::max({ distance(t[0], t[1]), distance(t[1], t[2]), distance(t[2], t[0]) });
        const int    m       = std::max(1, static_cast<int>(std::ceil(longest / spacing)));
        for (int i = 0; i <= m; ++i)
            for (int j = 0; i + j <= m; ++j)
                out.push_back(t[0] + (t[1] - t[0]) * (double(i) / m) + (t[2] - t[0]) * (double(j) / m));
    }
    return out;
}

std::vector<bool> coverage_mask(std::span<const Vec3> samples, std::span<const AeroColumn> columns, double radius)
{
    std::vector<bool> covered(samples.size(), false);
    if (columns.empty() || !(radius > 0.))
        return covered;

    struct Hash
    {
        std::size_t operator()(const std::pair<long, long>& k) const noexcept
        {
            return std::hash<long>()(k.first * 73856093L ^ k.second * 19349663L);
        }
    };
    std::unordered_map<std::pair<long, long>, std::vector<std::size_t>, Hash> cells;
    auto cell = [radius](Vec2 p) {
        return std::make_pair(static_cast<long>(std::floor(p.x / radius)), static_cast<long>(std::floor(p.y / radius)));
    };
    for (std::size_t i = 0; i < columns.size(); ++i)
        cells[cell(columns[i].center)].push_back(i);

    for (std::size_t s = 0; s < samples.size(); ++s) {
        const Vec2 p = samples[s].xy();
        const auto c = cell(p);
        for (long dx = -1; dx <= 1 && !covered[s]; ++dx)
            for (long dy = -1; dy <= 1 && !covered[s]; ++dy) {
                auto it = cells.find({ c.first + dx, c.second + dy });
                if (it == cells.end())
                    continue;
                for (std::size_t k : it->second)
                    if (distance(p, columns[k].center) <= radius) {
                        covered[s] = true;
                        break;
                    }
            }
    }
    return covered;
}

std::vector<AeroColumn> generate_aero_supports(std::span<const FacetRegion> regions, const AeroSupportParams& params)
{
    const double ew = params.extrusion_width;
    const double cw = params.column_width;
    const double s  = params.grid_spacing;
    if (!(ew > 0.))
        throw ConfigError("extrusion width must be positive");
    if (cw < ew - 1e-9 || cw > 3. * ew + 1e-9)
        throw ConfigError("aero column width " + std::to_string(cw) + " outside [1, 3] x extrusion width " +
                          std::to_string(ew));
    if (!(s > cw))
        throw ConfigError("aero grid spacing must exceed the column width");
    if (!(params.layer_height > 0.))
        throw ConfigError("layer height must be positive");

    const double            reach = s * std::sqrt(2.) / 2.;
    // Every surface point lies within `step` of a sample, so a sample that is
    // within reach - step of a column vouches for its whole neighbourhood.
    const double            step  = 0.1 * s;
    std::vector<AeroColumn> all;
    for (const FacetRegion& region : regions) {
        if (region.triangles.empty())
            continue;
        const BoundingBox3      bb = region.bounding_box();
        std::vector<AeroColumn> cols;

        auto axis = [s](double lo, double hi) {
            const double extent = hi - lo;
            const long   n      = static_cast<long>(std::floor(extent / s + 1e-9)) + 1;
            const double margin = 0.5 * (extent - static_cast<double>(n - 1) * s);
            std::vector<double> v;
            for (long i = 0; i < n; ++i)
                v.push_back(lo + margin + static_cast<double>(i) * s);
            return v;
        };
        const auto        xs = axis(bb.min.x, bb.max.x);
        const auto        ys = axis(bb.min.y, bb.max.y);
        std::vector<char> on_grid(xs.size() * ys.size(), 0);
        for (std::size_t j = 0; j < ys.size(); ++j)
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (auto z = vertical_hit(region, { xs[i], ys[j] })) {
                    cols.push_back({ { xs[i], ys[j] }, cw, 0., *z });
                    on_grid[j * xs.size() + i] = 1;
                }

        // A point inside a lattice cell with all four corners present is
        // within half a diagonal of one of them.
        auto in_full_cell = [&](Vec2 p) {
            const double fx = (p.x - xs.front()) / s, fy = (p.y - ys.front()) / s;
            if (fx < 0. || fy < 0.)
                return false;
            const std::size_t i = std::min(static_cast<std::size_t>(fx), xs.size() - 1);
            const std::size_t j = std::min(static_cast<std::size_t>(fy), ys.size() - 1);
            if (i + 1 >= xs.size() || j + 1 >= ys.size())
                return false;
            const std::size_t w = xs.size();
            return on_grid[j * w + i] && on_grid[j * w + i + 1] && on_grid[(j + 1) * w + i] &&
                   on_grid[(j + 1) * w + i + 1];
        };

        // Fill the gaps the lattice leaves along slanted or ragged outlines.
        ColumnGrid placed(s);
        for (const AeroColumn& c : cols)
            placed.insert(c.center);
        for (const Vec3& p : sample_region(region, step)) {
            if (in_full_cell(p.xy()) || placed.any_within(p.xy(), reach - step))
                continue;
            const auto z = vertical_hit(region, p.xy());
            cols.push_back({ p.xy(), cw, 0., z ? *z : p.z });
            placed.insert(p.xy());
        }

        for (const AeroColumn& c : cols)
            if (c.z_top - c.z_base >= 2. * params.layer_height - 1e-9)
                all.push_back(c);
    }
    return all;
}

std::vector<ToolPath> support_layer_paths(std::span<const AeroColumn> columns, int layer_index, double layer_top_z,
                                          double extrusion_width, int first_island_id)
{
    std::vector<ToolPath> out;
    int                   island = first_island_id;
    for (const AeroColumn& c : columns) {
        if (layer_top_z > c.z_top + 1e-9)
            continue;
        const int    strands = std::max(1, static_cast<int>(std::ceil(c.width / extrusion_width - 1e-9)));
        const double pitch   = c.width / strands;
        for (int k = 0; k < strands; ++k) {
            const double y = c.center.y - 0.5 * c.width + (k + 0.5) * pitch;
            ToolPath     p;
            p.points = { { c.center.x - 0.5 * c.width, y }, { c.center.x + 0.5 * c.width, y } };
            if (k % 2 == 1)
                std::reverse(p.points.begin(), p.points.end());
            p.role        = PathRole::support;
            p.width       = pitch;
            p.layer_index = layer_index;
            p.island      = island;
            out.push_back(std::move(p));
        }
        ++island;
    }
    return out;
}

double support_volume(std::span<const AeroColumn> columns, std::span<const LayerSlice> layers, double extrusion_width)
{
    double v = 0.;
    for (const LayerSlice& layer : layers)
        for (const ToolPath& p : support_layer_paths(columns, layer.index, layer.top_z, extrusion_width, 0))
            v += p.length() * p.width * layer.thickness;
    return v;
}

} // namespace flexslice
