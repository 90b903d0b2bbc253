#pragma once

#include "nhxy/errors.hpp"
#include "nhxy/numerics.hpp"
#include "nhxy/quantum_fock.hpp"
#include "nhxy/rg_core.hpp"
#include "nhxy/toy_classical.hpp"
#include "nhxy/walking.hpp"
