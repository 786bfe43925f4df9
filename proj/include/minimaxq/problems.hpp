#pragma once

#include "minimaxq/problems/catoni.hpp"
#include "minimaxq/problems/covariance.hpp"
#include "minimaxq/problems/density.hpp"
#include "minimaxq/problems/gaussian.hpp"
#include "minimaxq/problems/instance.hpp"
#include "minimaxq/problems/isotonic.hpp"
#include "minimaxq/problems/registry.hpp"
#include "minimaxq/problems/sco.hpp"
#include "minimaxq/problems/sparse.hpp"
