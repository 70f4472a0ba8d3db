#pragma once
// Umbrella header.

#include "evb/bounds.hpp"
#include "evb/checks.hpp"
#include "evb/gram.hpp"
#include "evb/matrix.hpp"
#include "evb/model_json.hpp"
#include "evb/models.hpp"
#include "evb/optimize.hpp"
#include "evb/psd.hpp"
#include "evb/rng.hpp"
#include "evb/simulate.hpp"
#include "evb/weights.hpp"
