#pragma once

// Umbrella header: the full library surface.

#include "adam3/baselines.hpp"
#include "adam3/diagnostics.hpp"
#include "adam3/errors.hpp"
#include "adam3/games.hpp"
#include "adam3/optimizer.hpp"
#include "adam3/rng.hpp"
#include "adam3/runner.hpp"
#include "adam3/theory.hpp"
#include "adam3/types.hpp"
