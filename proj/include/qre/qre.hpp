#pragma once

#include "qre/errors.hpp"
#include "qre/matkernel.hpp"
#include "qre/quantum_state.hpp"
#include "qre/measurement.hpp"
#include "qre/divergence.hpp"
#include "qre/schur_weyl.hpp"
#include "qre/io.hpp"
#include "qre/experiment.hpp"
