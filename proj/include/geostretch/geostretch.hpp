#pragma once

// Umbrella header for the library modules.

#include "geostretch/errors.hpp"
#include "geostretch/autodiff.hpp"
#include "geostretch/models.hpp"
#include "geostretch/fmanifold.hpp"
#include "geostretch/curvature.hpp"
#include "geostretch/stretching.hpp"
#include "geostretch/fcm.hpp"
#include "geostretch/geodesics.hpp"
