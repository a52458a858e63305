#pragma once

// Umbrella header.

#include "qscore/budget.hpp"
#include "qscore/config.hpp"
#include "qscore/error.hpp"
#include "qscore/graph.hpp"
#include "qscore/io.hpp"
#include "qscore/machine.hpp"
#include "qscore/protocol.hpp"
#include "qscore/qubo.hpp"
#include "qscore/remote.hpp"
#include "qscore/solver.hpp"
#include "qscore/solvers/annealing.hpp"
#include "qscore/solvers/exact.hpp"
#include "qscore/solvers/random.hpp"
#include "qscore/solvers/tabu.hpp"
