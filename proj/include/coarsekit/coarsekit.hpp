#pragma once

#include "coarsekit/coarsen.hpp"
#include "coarsekit/errors.hpp"
#include "coarsekit/json_io.hpp"
#include "coarsekit/matrix_market.hpp"
#include "coarsekit/metrics.hpp"
#include "coarsekit/rng.hpp"
#include "coarsekit/sampling.hpp"
#include "coarsekit/sparse_matrix.hpp"
#include "coarsekit/svd.hpp"
