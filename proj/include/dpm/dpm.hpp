#pragma once

#include "dpm/core.hpp"
#include "dpm/linalg.hpp"
#include "dpm/kernel.hpp"
#include "dpm/measure.hpp"
#include "dpm/kernels.hpp"
#include "dpm/extalg.hpp"
#include "dpm/random.hpp"
#include "dpm/sampler.hpp"
#include "dpm/graphs.hpp"
#include "dpm/lp.hpp"
#include "dpm/events.hpp"
#include "dpm/coupling.hpp"
#include "dpm/checks.hpp"
