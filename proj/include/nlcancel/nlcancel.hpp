// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nlcancel/canceller.hpp"
#include "nlcancel/cholesky.hpp"
#include "nlcancel/dictionary.hpp"
#include "nlcancel/distortion.hpp"
#include "nlcancel/errors.hpp"
#include "nlcancel/harness/config.hpp"
#include "nlcancel/harness/experiment.hpp"
#include "nlcancel/seeding.hpp"
#include "nlcancel/signal.hpp"
#include "nlcancel/solvers.hpp"
