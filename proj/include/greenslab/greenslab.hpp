#pragma once

#include "greenslab/errors.hpp"
#include "greenslab/grid.hpp"
#include "greenslab/problem.hpp"
#include "greenslab/linalg.hpp"
#include "greenslab/discretize.hpp"
#include "greenslab/kernel.hpp"
#include "greenslab/oracles.hpp"
#include "greenslab/positivity.hpp"
#include "greenslab/report.hpp"
