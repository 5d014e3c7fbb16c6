#pragma once

#include "zmap/band.hpp"
#include "zmap/constants.hpp"
#include "zmap/ergodic.hpp"
#include "zmap/errors.hpp"
#include "zmap/resonance.hpp"
#include "zmap/smallmat.hpp"
#include "zmap/su_geometry.hpp"
