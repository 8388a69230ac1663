#pragma once

#include <sdmap/basin.hpp>
#include <sdmap/bifurcation.hpp>
#include <sdmap/critical.hpp>
#include <sdmap/cycles.hpp>
#include <sdmap/error.hpp>
#include <sdmap/lyapunov.hpp>
#include <sdmap/map_core.hpp>
#include <sdmap/parallel.hpp>
