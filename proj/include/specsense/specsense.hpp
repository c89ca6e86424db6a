#pragma once

// Umbrella header: cooperative spectrum-sensing simulation toolkit.

#include "specsense/config.hpp"
#include "specsense/csv.hpp"
#include "specsense/energy_detector.hpp"
#include "specsense/fusion.hpp"
#include "specsense/montecarlo.hpp"
#include "specsense/rng.hpp"
#include "specsense/signal_model.hpp"
#include "specsense/special_functions.hpp"
