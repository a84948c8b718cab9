#include "flexslice/slice_core.hpp"

#include "flexslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace flexslice {

std::optional<Segment2> triangle_plane_segment(const Triangle& tri, double z)
{
    // A vertex on the plane counts as lifted by kPlanePerturbation, i.e. above.
    bool above[3];
    int  n_above = 0;
    for (int k = 0; k < 3; ++k) {
        above[k] = tri[k].z >= z;
        n_above += above[k];
    }
    if (n_above == 0 || n_above == 3)
        return std::nullopt;

    // Always interpolate from the lower to the upper vertex so that the two
    // triangles sharing an edge produce bit-identical points.
    auto crossing = [z](const Vec3& below, const Vec3& up) {
        const double zu = up.z == z ? z + kPlanePerturbation : up.z;
        const double t  = (z - below.z) / (zu - below.z);
        return Vec2 { below.x + t * (up.x - below.x), below.y + t * (up.y - below.y) };
    };

    Vec2 up_point {}, down_point {};
    for (int k = 0; k < 3; ++k) {
        const int j = (k + 1) % 3;
        if (!above[k] && above[j])
            up_point = crossing(tri[k], tri[j]);
        else if (above[k] && !above[j])
            down_point = crossing(tri[j], tri[k]);
    }
    return Segment2 { down_point, up_point };
}

namespace {

// A crossing point is identified by the mesh edge it lies on, so shared
// edges give exact connectivity regardless of how small the section is.
using EdgeKey = std::uint64_t;

EdgeKey edge_key(std::uint32_t a, std::uint32_t b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<EdgeKey>(a) << 32) | b;
}

struct KeyedSegment
{
    Vec2    a, b;
    EdgeKey ka, kb;
};

// Same classification and interpolation as triangle_plane_segment, plus the
// edges the two endpoints lie on.
std::optional<KeyedSegment> keyed_segment(const TriangleMesh& mesh, std::uint32_t t, double z)
{
    const auto&    idx = mesh.triangles[t];
    const Triangle tri = mesh.triangle(t);
    const auto     seg = triangle_plane_segment(tri, z);
    if (!seg)
        return std::nullopt;
    KeyedSegment out { seg->a, seg->b, 0, 0 };
    for (int k = 0; k < 3; ++k) {
        const int  j        = (k + 1) % 3;
        const bool above_k  = tri[k].z >= z;
        const bool above_j  = tri[j].z >= z;
        if (!above_k && above_j)
            out.kb = edge_key(idx[k], idx[j]);
        else if (above_k && !above_j)
            out.ka = edge_key(idx[k], idx[j]);
    }
    return out;
}

struct GridKey
{
    long long x, y;
    bool      operator==(const GridKey&) const = default;
};

struct GridKeyHash
{
    std::size_t operator()(const GridKey& k) const noexcept
    {
        return std::hash<long long>()(k.x * 73856093LL ^ k.y * 19349663LL);
    }
};

GridKey grid_key(Vec2 p)
{
    return { std::llround(p.x / kSnapTolerance), std::llround(p.y / kSnapTolerance) };
}

// Joins polylines whose ends lie within the snap tolerance. Only pieces the
// exact edge chaining could not close (non-manifold input) end up here.
struct Stitcher
{
    const std::vector<std::vector<Vec2>>&                               pieces;
    std::vector<bool>                                                   used;
    std::unordered_map<GridKey, std::vector<std::size_t>, GridKeyHash> by_start, by_end;

    explicit Stitcher(const std::vector<std::vector<Vec2>>& p) : pieces(p), used(p.size(), false)
    {
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            by_start[grid_key(pieces[i].front())].push_back(i);
            by_end[grid_key(pieces[i].back())].push_back(i);
        }
    }

    // Next unused piece touching p; reversed when it is reached by its end.
    std::optional<std::pair<std::size_t, bool>> next(Vec2 p)
    {
        const GridKey k = grid_key(p);
        for (int pass = 0; pass < 2; ++pass) {
            auto& index = pass == 0 ? by_start : by_end;
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy) {
                    // The exact cell first, neighbours only within the snap radius.
                    const bool centre = dx == 0 && dy == 0;
                    auto       it     = index.find({ k.x + dx, k.y + dy });
                    if (it == index.end())
                        continue;
                    for (std::size_t s : it->second) {
                        if (used[s])
                            continue;
                        const Vec2 q = pass == 0 ? pieces[s].front() : pieces[s].back();
                        if (centre || distance(p, q) <= kSnapTolerance)
                            return std::make_pair(s, pass == 1);
                    }
                }
        }
        return std::nullopt;
    }

    void run(std::vector<std::vector<Vec2>>& loops, int& open_chains)
    {
        for (std::size_t s0 = 0; s0 < pieces.size(); ++s0) {
            if (used[s0])
                continue;
            used[s0]                = true;
            std::vector<Vec2> chain = pieces[s0];
            const Vec2        start = chain.front();
            bool              closed = false;
            for (;;) {
                const Vec2 cur = chain.back();
                if (chain.size() >= 3 && (grid_key(cur) == grid_key(start) || distance(cur, start) <= kSnapTolerance)) {
                    chain.pop_back();
                    closed = true;
                    break;
                }
                auto nx = next(cur);
                if (!nx)
                    break;
                used[nx->first] = true;
                const auto& piece = pieces[nx->first];
                if (nx->second)
                    chain.insert(chain.end(), piece.rbegin() + 1, piece.rend());
                else
                    chain.insert(chain.end(), piece.begin() + 1, piece.end());
            }
            if (closed)
                loops.push_back(std::move(chain));
            else
                ++open_chains;
        }
    }
};

LayerSlice slice_plane(const TriangleMesh& mesh, const std::vector<std::uint32_t>& candidates, double z)
{
    std::vector<KeyedSegment> segs;
    segs.reserve(candidates.size());
    for (std::uint32_t t : candidates)
        if (auto s = keyed_segment(mesh, t, z))
            segs.push_back(*s);

    // Exact pass: follow segments through the edges they share. An edge
    // claimed by more than two faces is ambiguous and left to the fallback.
    std::unordered_map<EdgeKey, std::size_t> starting_at;
    std::unordered_map<EdgeKey, int>         starts;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        starting_at.emplace(segs[i].ka, i);
        ++starts[segs[i].ka];
    }

    std::vector<bool>              used(segs.size(), false);
    std::vector<std::vector<Vec2>> loops, pieces;
    for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
        if (used[s0])
            continue;
        used[s0] = true;
        std::vector<Vec2> chain { segs[s0].a, segs[s0].b };
        EdgeKey           at     = segs[s0].kb;
        bool              closed = false;
        for (;;) {
            if (at == segs[s0].ka) {
                chain.pop_back();
                closed = true;
                break;
            }
            auto it = starting_at.find(at);
            if (it == starting_at.end() || starts[at] != 1 || used[it->second])
                break;
            used[it->second] = true;
            chain.push_back(segs[it->second].b);
            at = segs[it->second].kb;
        }
        (closed ? loops : pieces).push_back(std::move(chain));
    }

    LayerSlice layer;
    layer.z = z;
    if (!pieces.empty()) {
        // Pieces may have been started mid-chain; the fallback rejoins them.
        Stitcher stitcher(pieces);
        stitcher.run(loops, layer.open_chains);
    }
    layer.contours = normalize_loops(std::move(loops));
    return layer;
}

} // namespace

std::vector<LayerSlice> slice_mesh(const TriangleMesh& mesh, double layer_height, double first_layer_height,
                                   unsigned threads)
{
    if (!(layer_height >= kMinLayerHeight && layer_height <= kMaxLayerHeight))
        throw ConfigError("layer height " + std::to_string(layer_height) + " outside [0.04, 1.0] mm");
    if (!(first_layer_height >= kMinLayerHeight && first_layer_height <= kMaxLayerHeight))
        throw ConfigError("first layer height " + std::to_string(first_layer_height) + " outside [0.04, 1.0] mm");
    if (mesh.empty())
        throw GeometryError("slice_mesh: empty mesh");

    const BoundingBox3 bb   = mesh.bounding_box();
    const double       base = bb.min.z;
    const double       top  = bb.max.z;

    std::vector<double> planes, tops, thick;
    planes.push_back(base + 0.5 * first_layer_height);
    tops.push_back(base + first_layer_height);
    thick.push_back(first_layer_height);
    if (planes.front() >= top) {
        // Part thinner than half a first layer: one plane through its middle.
        planes.front() = 0.5 * (base + top);
    } else {
        for (int i = 1;; ++i) {
            const double z = base + first_layer_height + (i - 0.5) * layer_height;
            if (z >= top)
                break;
            planes.push_back(z);
            tops.push_back(base + first_layer_height + i * layer_height);
            thick.push_back(layer_height);
        }
    }

    // Bucket triangles by the planes they can cross: z in (zmin, zmax].
    std::vector<std::vector<std::uint32_t>> buckets(planes.size());
    for (std::uint32_t t = 0; t < mesh.size(); ++t) {
        const Triangle tri  = mesh.triangle(t);
        const double   zmin = std::min({ tri[0].z, tri[1].z, tri[2].z });
        const double   zmax = std::max({ tri[0].z, tri[1].z, tri[2].z });
        auto           lo   = std::upper_bound(planes.begin(), planes.end(), zmin);
        auto           hi   = std::upper_bound(planes.begin(), planes.end(), zmax);
        for (auto it = lo; it != hi; ++it)
            buckets[static_cast<std::size_t>(it - planes.begin())].push_back(t);
    }

    std::vector<LayerSlice> layers(planes.size());
    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < planes.size(); i += step) {
            layers[i]           = slice_plane(mesh, buckets[i], planes[i]);
            layers[i].index     = static_cast<int>(i);
            layers[i].thickness = thick[i];
            layers[i].top_z     = tops[i];
        }
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, planes.size()));
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, t, threads);
    }
    return layers;
}

} // namespace flexslice
