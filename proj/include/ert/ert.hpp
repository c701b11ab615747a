#pragma once

// Umbrella header for the exponential Radon transform toolkit.

#include "ert/accumulate.hpp"
#include "ert/bessel.hpp"
#include "ert/fbp.hpp"
#include "ert/fft.hpp"
#include "ert/filter.hpp"
#include "ert/geometry.hpp"
#include "ert/grid.hpp"
#include "ert/parallel.hpp"
#include "ert/phantom.hpp"
#include "ert/quadrature.hpp"
#include "ert/risk.hpp"
#include "ert/rng.hpp"
#include "ert/sinogram.hpp"
#include "ert/sobolev.hpp"
#include "ert/stochastic.hpp"
#include "ert/transform.hpp"
