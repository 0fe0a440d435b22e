#pragma once

#include "cpnorm/error.hpp"
#include "cpnorm/random.hpp"
#include "cpnorm/hermitian.hpp"
#include "cpnorm/schatten.hpp"
#include "cpnorm/cp_map.hpp"
#include "cpnorm/hilbert.hpp"
#include "cpnorm/power_method.hpp"
#include "cpnorm/diagnostics.hpp"
#include "cpnorm/oracle.hpp"
#include "cpnorm/generate.hpp"
