#pragma once

// Everything except the HTTP client, which pulls in httplib.

#include "bpl/artifacts.hpp"
#include "bpl/config.hpp"
#include "bpl/dataset.hpp"
#include "bpl/error.hpp"
#include "bpl/evaluation.hpp"
#include "bpl/features.hpp"
#include "bpl/grounding.hpp"
#include "bpl/hybrid.hpp"
#include "bpl/inference.hpp"
#include "bpl/logistic.hpp"
#include "bpl/metrics.hpp"
#include "bpl/pipeline.hpp"
#include "bpl/population.hpp"
#include "bpl/random.hpp"
#include "bpl/synthetic.hpp"
