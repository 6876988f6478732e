#pragma once

#include "ccchart/chart_geometry.hpp"
#include "ccchart/converter_model.hpp"
#include "ccchart/error.hpp"
#include "ccchart/feasibility.hpp"
#include "ccchart/parallel.hpp"
#include "ccchart/sizing.hpp"
#include "ccchart/slice.hpp"
