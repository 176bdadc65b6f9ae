// aaphase.hpp -- umbrella header for the whole library.
#pragma once

#include "cli.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "phase.hpp"
#include "propagator.hpp"
#include "regimes.hpp"
#include "verify.hpp"
