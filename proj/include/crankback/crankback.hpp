#pragma once

#include "crankback/analytic.hpp"
#include "crankback/approx.hpp"
#include "crankback/errors.hpp"
#include "crankback/golden.hpp"
#include "crankback/grid.hpp"
#include "crankback/normal.hpp"
#include "crankback/planner.hpp"
#include "crankback/profile.hpp"
#include "crankback/quadrature.hpp"
#include "crankback/scenario.hpp"
#include "crankback/simulation.hpp"
#include "crankback/io/report.hpp"
#include "crankback/io/scenario_file.hpp"
