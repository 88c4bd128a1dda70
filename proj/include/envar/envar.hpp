#pragma once

// Umbrella header for the whole library.

#include "envar/version.hpp"
#include "envar/errors.hpp"
#include "envar/rational.hpp"
#include "envar/state.hpp"
#include "envar/schmidt.hpp"
#include "envar/envariance.hpp"
#include "envar/finegraining.hpp"
#include "envar/ensemble.hpp"
#include "envar/random.hpp"
#include "envar/state_io.hpp"
#include "envar/report.hpp"
