#pragma once

#include "centaur/chess/board.hpp"
#include "centaur/chess/features.hpp"
#include "centaur/chess/movegen.hpp"
#include "centaur/chess/notation.hpp"
#include "centaur/chess/outcome.hpp"
#include "centaur/chess/position.hpp"
#include "centaur/chess/tokens.hpp"
#include "centaur/chess/types.hpp"
