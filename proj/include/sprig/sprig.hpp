#pragma once

#include "bench.hpp"
#include "clinical.hpp"
#include "config.hpp"
#include "core.hpp"
#include "data.hpp"
#include "eval.hpp"
#include "fit.hpp"
#include "generate.hpp"
#include "individual.hpp"
#include "lm.hpp"
#include "metrics.hpp"
#include "node.hpp"
#include "program.hpp"
#include "search.hpp"
#include "selection.hpp"
#include "serialize.hpp"
#include "simplify.hpp"
#include "split.hpp"
#include "survival.hpp"
#include "threading.hpp"
#include "variation.hpp"
