#pragma once

#include "nhxy/numerics/eigen.hpp"
#include "nhxy/numerics/fit.hpp"
#include "nhxy/numerics/matrix.hpp"
#include "nhxy/numerics/newton.hpp"
#include "nhxy/numerics/ode.hpp"
#include "nhxy/numerics/quadrature.hpp"
#include "nhxy/numerics/special_functions.hpp"
