#pragma once

#include "analysis.hpp"
#include "banded.hpp"
#include "constants.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "microstructure.hpp"
#include "minimizer.hpp"
#include "numeric.hpp"
#include "polynomial.hpp"
#include "potential.hpp"
#include "transition.hpp"
