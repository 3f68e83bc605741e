#pragma once

#include "adasim/baselines.hpp"
#include "adasim/embedding.hpp"
#include "adasim/error.hpp"
#include "adasim/evaluation.hpp"
#include "adasim/graph.hpp"
#include "adasim/metrics.hpp"
#include "adasim/rng.hpp"
#include "adasim/similarity.hpp"
#include "adasim/split.hpp"
#include "adasim/walk.hpp"
