#pragma once

#include "caloric/errors.hpp"
#include "caloric/rational.hpp"
#include "caloric/polynomial.hpp"
#include "caloric/linalg.hpp"
#include "caloric/lattice.hpp"
#include "caloric/spaces.hpp"
#include "caloric/graph.hpp"
#include "caloric/heat.hpp"
