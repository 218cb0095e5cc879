#pragma once

#include "dst2/diagnostics.hpp"
#include "dst2/errors.hpp"
#include "dst2/exact.hpp"
#include "dst2/graph.hpp"
#include "dst2/io.hpp"
#include "dst2/linear_program.hpp"
#include "dst2/lp_model.hpp"
#include "dst2/max_flow.hpp"
#include "dst2/pipeline.hpp"
#include "dst2/reductions.hpp"
#include "dst2/rounding.hpp"
#include "dst2/shallow_tree.hpp"
#include "dst2/simplex.hpp"
#include "dst2/solution.hpp"
#include "dst2/verify.hpp"
