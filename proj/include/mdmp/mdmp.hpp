#pragma once

#include "mdmp/core.hpp"
#include "mdmp/reeds_shepp.hpp"
#include "mdmp/double_integrator.hpp"
#include "mdmp/systems.hpp"
#include "mdmp/sampling.hpp"
#include "mdmp/dispersion.hpp"
#include "mdmp/graph.hpp"
#include "mdmp/graph_io.hpp"
#include "mdmp/occupancy.hpp"
#include "mdmp/planner.hpp"
#include "mdmp/baseline.hpp"
#include "mdmp/bench.hpp"
#include "mdmp/svg.hpp"
#include "mdmp/config.hpp"
