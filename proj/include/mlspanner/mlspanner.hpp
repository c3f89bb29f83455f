#pragma once

#include "mlspanner/algorithms.hpp"
#include "mlspanner/bench.hpp"
#include "mlspanner/exact.hpp"
#include "mlspanner/generators.hpp"
#include "mlspanner/graph.hpp"
#include "mlspanner/ilp.hpp"
#include "mlspanner/multilevel.hpp"
#include "mlspanner/pairwise.hpp"
#include "mlspanner/rng.hpp"
#include "mlspanner/shortest_paths.hpp"
#include "mlspanner/subsetwise.hpp"
