#pragma once

// Umbrella header.
#include "tacmap/bench/bench.hpp"
#include "tacmap/contact/signals.hpp"
#include "tacmap/contact/signals_json.hpp"
#include "tacmap/error.hpp"
#include "tacmap/geometry/bvh.hpp"
#include "tacmap/geometry/mesh.hpp"
#include "tacmap/geometry/mesh_io.hpp"
#include "tacmap/geometry/pose.hpp"
#include "tacmap/geometry/primitives.hpp"
#include "tacmap/geometry/ray.hpp"
#include "tacmap/metrics/metrics.hpp"
#include "tacmap/parallel.hpp"
#include "tacmap/render/deform_map.hpp"
#include "tacmap/render/renderer.hpp"
#include "tacmap/replay/replay.hpp"
#include "tacmap/replay/scene_config.hpp"
#include "tacmap/replay/trajectory.hpp"
#include "tacmap/sensor/grid_io.hpp"
#include "tacmap/sensor/sensing_grid.hpp"
#include "tacmap/sensor/surface.hpp"
#include "tacmap/session.hpp"
#include "tacmap/version.hpp"
