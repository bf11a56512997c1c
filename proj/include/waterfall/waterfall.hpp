#pragma once

// Umbrella header for the waterfall-threshold FER toolkit.

#include "waterfall/channel.hpp"
#include "waterfall/conv_code.hpp"
#include "waterfall/csv.hpp"
#include "waterfall/errors.hpp"
#include "waterfall/fer_model.hpp"
#include "waterfall/montecarlo.hpp"
#include "waterfall/numerics.hpp"
#include "waterfall/rng.hpp"
#include "waterfall/scheme.hpp"
#include "waterfall/snr.hpp"
#include "waterfall/threshold.hpp"
#include "waterfall/turbo_code.hpp"
