#pragma once

#include "mopkit/ensemble.hpp"
#include "mopkit/equilibrium.hpp"
#include "mopkit/error.hpp"
#include "mopkit/extended.hpp"
#include "mopkit/interval.hpp"
#include "mopkit/mop.hpp"
#include "mopkit/polynomial.hpp"
#include "mopkit/quadrature.hpp"
#include "mopkit/sampler.hpp"
#include "mopkit/weights.hpp"
