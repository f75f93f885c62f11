#pragma once

#include "seglink/agents.hpp"
#include "seglink/behavior.hpp"
#include "seglink/chains.hpp"
#include "seglink/core.hpp"
#include "seglink/error.hpp"
#include "seglink/experiments.hpp"
#include "seglink/game.hpp"
#include "seglink/linking.hpp"
#include "seglink/ngram.hpp"
#include "seglink/render.hpp"
#include "seglink/rng.hpp"
#include "seglink/structures.hpp"
