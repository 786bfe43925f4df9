#pragma once

#include "minimaxq/estimators/aggregation.hpp"
#include "minimaxq/estimators/basic.hpp"
#include "minimaxq/estimators/kde.hpp"
#include "minimaxq/estimators/sgd.hpp"
#include "minimaxq/estimators/slope.hpp"
#include "minimaxq/estimators/spec.hpp"
