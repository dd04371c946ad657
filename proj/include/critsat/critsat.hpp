#pragma once

#include "critsat/error.hpp"
#include "critsat/formula.hpp"
#include "critsat/dimacs.hpp"
#include "critsat/rng.hpp"
#include "critsat/sampling.hpp"
#include "critsat/solve.hpp"
#include "critsat/propagation.hpp"
#include "critsat/theory.hpp"
#include "critsat/stats.hpp"
#include "critsat/harness.hpp"
#include "critsat/report.hpp"
