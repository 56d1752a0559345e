#pragma once

#include "barrier_comp/compose.hpp"
#include "barrier_comp/dynamics.hpp"
#include "barrier_comp/filter.hpp"
#include "barrier_comp/io.hpp"
#include "barrier_comp/oracle.hpp"
#include "barrier_comp/scenario.hpp"
#include "barrier_comp/sim.hpp"
#include "barrier_comp/spec.hpp"
