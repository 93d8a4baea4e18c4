#pragma once

#include "persuade/casebook.hpp"
#include "persuade/errors.hpp"
#include "persuade/io.hpp"
#include "persuade/kernel.hpp"
#include "persuade/martingale.hpp"
#include "persuade/measure.hpp"
#include "persuade/policy.hpp"
#include "persuade/random_instances.hpp"
#include "persuade/rational.hpp"
#include "persuade/simplex.hpp"
#include "persuade/solver.hpp"
