#pragma once

#include "ddradar/error.hpp"
#include "ddradar/modmath.hpp"
#include "ddradar/fft.hpp"
#include "ddradar/parallel.hpp"
#include "ddradar/ddcore.hpp"
#include "ddradar/heisenberg.hpp"
#include "ddradar/symplectic.hpp"
#include "ddradar/subgroups.hpp"
#include "ddradar/ambiguity.hpp"
#include "ddradar/radarsim.hpp"
#include "ddradar/io.hpp"
