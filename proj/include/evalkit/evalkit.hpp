#pragma once

#include "compare.hpp"
#include "data.hpp"
#include "intervals.hpp"
#include "metrics.hpp"
#include "models.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "resampling.hpp"
#include "rng.hpp"
#include "roc.hpp"
#include "serialize.hpp"
#include "sim.hpp"
#include "stages.hpp"

namespace evalkit {
inline constexpr const char* version = "0.1.0";
}
