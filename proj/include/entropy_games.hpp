#pragma once

// Entropy games: model, operators, spectral tools, solvers, certificates and harness.

#include "entropy_games/certificates.hpp"
#include "entropy_games/convex.hpp"
#include "entropy_games/decomposition.hpp"
#include "entropy_games/error.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/game_io.hpp"
#include "entropy_games/graph.hpp"
#include "entropy_games/harness.hpp"
#include "entropy_games/matrix.hpp"
#include "entropy_games/operators.hpp"
#include "entropy_games/random.hpp"
#include "entropy_games/solvers.hpp"
#include "entropy_games/spectral.hpp"
#include "entropy_games/structure.hpp"
