#pragma once

#include "lorawban/error.hpp"
#include "lorawban/numerics.hpp"
#include "lorawban/units.hpp"
#include "lorawban/rng.hpp"
#include "lorawban/phy.hpp"
#include "lorawban/channel.hpp"
#include "lorawban/bep.hpp"
#include "lorawban/mac.hpp"
#include "lorawban/metrics.hpp"
#include "lorawban/montecarlo.hpp"
#include "lorawban/config.hpp"
#include "lorawban/experiment.hpp"
#include "lorawban/acceptance.hpp"
