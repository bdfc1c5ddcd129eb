// Umbrella header: the whole library in one include.

#pragma once

#include "everett/analytic.hpp"
#include "everett/estimate.hpp"
#include "everett/io.hpp"
#include "everett/oracle.hpp"
#include "everett/rng.hpp"
#include "everett/sim.hpp"
#include "everett/special.hpp"
