#pragma once

#include "htopt/errors.hpp"
#include "htopt/grid.hpp"
#include "htopt/returns_model.hpp"
#include "htopt/spectral_engine.hpp"
#include "htopt/pricing.hpp"
#include "htopt/no_arbitrage.hpp"
#include "htopt/truncation_analysis.hpp"
#include "htopt/calibration.hpp"
#include "htopt/market_data.hpp"
#include "htopt/oracle.hpp"
