#ifndef DESPAN_DESPAN_HPP
#define DESPAN_DESPAN_HPP

#include "despan/error.hpp"
#include "despan/euclid.hpp"
#include "despan/experiments.hpp"
#include "despan/io.hpp"
#include "despan/lso.hpp"
#include "despan/parallel.hpp"
#include "despan/points.hpp"
#include "despan/random.hpp"
#include "despan/rank_graph.hpp"
#include "despan/reachability.hpp"
#include "despan/spanners_1d.hpp"

#endif  // DESPAN_DESPAN_HPP
