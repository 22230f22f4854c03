// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#ifndef MSRL_ALL_HPP_
#define MSRL_ALL_HPP_

#include "msrl/checkpoint.hpp"
#include "msrl/common.hpp"
#include "msrl/envsim.hpp"
#include "msrl/experiment.hpp"
#include "msrl/io.hpp"
#include "msrl/msrl.hpp"
#include "msrl/neural.hpp"
#include "msrl/policies.hpp"
#include "msrl/roadnet.hpp"
#include "msrl/scenario.hpp"
#include "msrl/switching.hpp"
#include "msrl/trajgen.hpp"

#endif  // MSRL_ALL_HPP_
