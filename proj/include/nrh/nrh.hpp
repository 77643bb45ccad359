#pragma once

// Umbrella header for the numerical part of the library (no JSON).

#include "nrh/linalg.hpp"
#include "nrh/numrad.hpp"
#include "nrh/space.hpp"
#include "nrh/reps.hpp"
#include "nrh/minspace.hpp"
#include "nrh/duality.hpp"
#include "nrh/factorize.hpp"
#include "nrh/schur.hpp"
