#pragma once

#include "mesh.hpp"
#include "quadrature.hpp"
#include "lagrange.hpp"
#include "elements.hpp"
#include "spaces.hpp"
#include "assembly.hpp"
#include "solver.hpp"
#include "analysis.hpp"
#include "verify.hpp"
