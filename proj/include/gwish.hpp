#pragma once

// Umbrella header for the gwish library: Bayesian structure learning for
// Gaussian graphical models with G-Wishart priors.

#include "gwish/bdmcmc.hpp"
#include "gwish/common.hpp"
#include "gwish/graph.hpp"
#include "gwish/gwishart.hpp"
#include "gwish/io.hpp"
#include "gwish/rng.hpp"
#include "gwish/sampler.hpp"
#include "gwish/simharness.hpp"
#include "gwish/special.hpp"
#include "gwish/version.hpp"
