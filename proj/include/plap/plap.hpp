#pragma once

#include "plap/errors.hpp"
#include "plap/ptrig.hpp"
#include "plap/ode.hpp"
#include "plap/potential.hpp"
#include "plap/potential_io.hpp"
#include "plap/prufer.hpp"
#include "plap/eigensolver.hpp"
#include "plap/theorems.hpp"
#include "plap/format.hpp"
#include "plap/report.hpp"
