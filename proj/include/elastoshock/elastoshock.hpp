#pragma once

#include "elastoshock/errors.hpp"
#include "elastoshock/tolerances.hpp"
#include "elastoshock/core_states.hpp"
#include "elastoshock/classification.hpp"
#include "elastoshock/energy_criterion.hpp"
#include "elastoshock/symmetrizer.hpp"
#include "elastoshock/lopatinski.hpp"
#include "elastoshock/json_io.hpp"
#include "elastoshock/scan.hpp"
