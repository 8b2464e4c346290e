#pragma once

#include "shortrate/analysis.hpp"
#include "shortrate/approx.hpp"
#include "shortrate/calib.hpp"
#include "shortrate/closedform.hpp"
#include "shortrate/dataset.hpp"
#include "shortrate/error.hpp"
#include "shortrate/expexp.hpp"
#include "shortrate/models.hpp"
#include "shortrate/pdeoracle.hpp"
#include "shortrate/power_sum.hpp"
#include "shortrate/reproduce.hpp"
#include "shortrate/series.hpp"
#include "shortrate/simulate.hpp"
