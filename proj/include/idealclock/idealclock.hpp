#pragma once

#include "idealclock/chronometry.hpp"
#include "idealclock/dynamics.hpp"
#include "idealclock/errors.hpp"
#include "idealclock/io.hpp"
#include "idealclock/legendre.hpp"
#include "idealclock/minkowski.hpp"
#include "idealclock/sampling.hpp"
#include "idealclock/state.hpp"
