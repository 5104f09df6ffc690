#pragma once

#include "boxmetrics/core.hpp"
#include "boxmetrics/distance.hpp"
#include "boxmetrics/hull.hpp"
#include "boxmetrics/intersection.hpp"
#include "boxmetrics/metrics.hpp"
#include "boxmetrics/oracles.hpp"
