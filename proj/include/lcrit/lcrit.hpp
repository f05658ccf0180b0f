#pragma once

#include "lcrit/arith.hpp"
#include "lcrit/clt.hpp"
#include "lcrit/discrepancy.hpp"
#include "lcrit/errors.hpp"
#include "lcrit/lfunction.hpp"
#include "lcrit/measures.hpp"
#include "lcrit/parallel.hpp"
#include "lcrit/philox.hpp"
#include "lcrit/random_model.hpp"
#include "lcrit/smoothing.hpp"
#include "lcrit/zeta_eval.hpp"
