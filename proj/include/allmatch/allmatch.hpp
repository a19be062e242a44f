#pragma once

#include "ensemble.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "exact.hpp"
#include "matrix.hpp"
#include "moments.hpp"
#include "numeric.hpp"
#include "oracles.hpp"
#include "random.hpp"
#include "verify.hpp"
