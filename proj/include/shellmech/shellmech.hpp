#pragma once

#include "shellmech/analysis.hpp"
#include "shellmech/assembly.hpp"
#include "shellmech/cell.hpp"
#include "shellmech/cell_io.hpp"
#include "shellmech/effective.hpp"
#include "shellmech/generators.hpp"
#include "shellmech/macro.hpp"
#include "shellmech/optimize.hpp"
