#pragma once

#include "analytic.hpp"
#include "io.hpp"
#include "numeric.hpp"
#include "params.hpp"
#include "potential.hpp"
#include "spectra.hpp"
#include "transfer_matrix.hpp"
