#pragma once

#include "vflow/aggregate.hpp"
#include "vflow/condition.hpp"
#include "vflow/driver.hpp"
#include "vflow/engine_catapult.hpp"
#include "vflow/engine_naive.hpp"
#include "vflow/error.hpp"
#include "vflow/graph.hpp"
#include "vflow/propspec.hpp"
#include "vflow/report.hpp"
#include "vflow/solver.hpp"
#include "vflow/stats.hpp"
#include "vflow/summaries.hpp"
#include "vflow/vfg_format.hpp"
#include "vflow/walkers.hpp"
#include "vflow/workload.hpp"
