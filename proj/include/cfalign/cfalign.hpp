#pragma once

#include "cfalign/cf_transform.hpp"
#include "cfalign/channel.hpp"
#include "cfalign/compute_rates.hpp"
#include "cfalign/core_linalg.hpp"
#include "cfalign/errors.hpp"
#include "cfalign/interval_set.hpp"
#include "cfalign/lattice.hpp"
#include "cfalign/matrix.hpp"
#include "cfalign/outage.hpp"
#include "cfalign/regime.hpp"
#include "cfalign/symmetric_ic.hpp"
