#pragma once

#include "mixshift/asymptotics.hpp"
#include "mixshift/bootstrap.hpp"
#include "mixshift/distributions.hpp"
#include "mixshift/errors.hpp"
#include "mixshift/estimators.hpp"
#include "mixshift/io.hpp"
#include "mixshift/normal.hpp"
#include "mixshift/rng.hpp"
#include "mixshift/simulation.hpp"
