#pragma once

#include "darima/error.hpp"
#include "darima/series.hpp"
#include "darima/polynomial.hpp"
#include "darima/io.hpp"

#include "darima/arima/auto.hpp"
#include "darima/arima/css.hpp"
#include "darima/arima/predict.hpp"
#include "darima/arima/roots.hpp"
#include "darima/arima/simulate.hpp"
#include "darima/arima/stationarity.hpp"
#include "darima/arima/types.hpp"

#include "darima/combine.hpp"
#include "darima/forecast.hpp"
#include "darima/linrep.hpp"

#include "darima/cluster/coordinator.hpp"
#include "darima/cluster/job.hpp"
#include "darima/cluster/protocol.hpp"
#include "darima/cluster/worker.hpp"

#include "darima/eval/benchmark.hpp"
#include "darima/eval/metrics.hpp"
