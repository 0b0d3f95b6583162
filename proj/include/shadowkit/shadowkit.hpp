#pragma once

/// Umbrella header: the library and every bundled system.

#include "shadowkit/core.hpp"
#include "shadowkit/sampling.hpp"
#include "shadowkit/brackets.hpp"
#include "shadowkit/bowen.hpp"
#include "shadowkit/systems/torus.hpp"
#include "shadowkit/systems/circle.hpp"
#include "shadowkit/systems/sequence.hpp"
#include "shadowkit/systems/odometer.hpp"
#include "shadowkit/verify.hpp"
#include "shadowkit/io.hpp"
