#pragma once

#include "flexslice/config.hpp"
#include "flexslice/drc.hpp"
#include "flexslice/gcode.hpp"
#include "flexslice/supports.hpp"

#include <vector>

namespace flexslice {

struct SliceJob
{
    TriangleMesh                           mesh; // oriented for printing
    Transform                              transform;
    std::vector<LayerSlice>                slices;
    std::vector<std::vector<BridgeRegion>> bridges;
    std::vector<FacetRegion>               overhangs;
    std::vector<AeroColumn>                columns;
    DrcReport                              report;
    // Filled by plan_toolpaths: ordered paths (travel included) and moves per layer.
    std::vector<std::vector<ToolPath>>     paths;
    std::vector<LayerMoves>                moves;
};

// Copies the job-level layer height and support spacing into the DRC settings.
DrcConfig effective_drc_config(const JobConfig& job);

// Orient, slice, detect bridges and overhangs, place supports, run DRC.
SliceJob analyze(const TriangleMesh& mesh, const JobConfig& job);

// Extrusion paths for one layer before ordering.
std::vector<ToolPath> layer_toolpaths(const SliceJob& sj, std::size_t layer, const JobConfig& job);

// Fills `paths` and `moves`. Deterministic for any thread count.
void plan_toolpaths(SliceJob& sj, const JobConfig& job);

GcodeProgram emit_job(const SliceJob& sj, const JobConfig& job);

} // namespace flexslice
