#pragma once

#include "ivfs/core.hpp"
#include "ivfs/dataset.hpp"
#include "ivfs/metricspace.hpp"
#include "ivfs/ivfs.hpp"
#include "ivfs/persistence.hpp"
#include "ivfs/diagram_metrics.hpp"
#include "ivfs/baselines.hpp"
#include "ivfs/evaluation.hpp"
#include "ivfs/report.hpp"
#include "ivfs/experiment.hpp"
