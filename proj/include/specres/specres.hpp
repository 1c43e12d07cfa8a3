#pragma once

// Umbrella header for the whole library.

#include "specres/blasso.hpp"
#include "specres/esprit.hpp"
#include "specres/harness.hpp"
#include "specres/io.hpp"
#include "specres/measure.hpp"
#include "specres/metrics.hpp"
#include "specres/noise_shaping.hpp"
#include "specres/rng.hpp"
