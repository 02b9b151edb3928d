#pragma once

#include "steerkit/bounds.hpp"
#include "steerkit/chsh.hpp"
#include "steerkit/core.hpp"
#include "steerkit/sim.hpp"
#include "steerkit/steering.hpp"
#include "steerkit/version.hpp"
