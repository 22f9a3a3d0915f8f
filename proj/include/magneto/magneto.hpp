#pragma once

#include "magneto/analysis.hpp"
#include "magneto/bounds.hpp"
#include "magneto/cog_model.hpp"
#include "magneto/control.hpp"
#include "magneto/core.hpp"
#include "magneto/estimators.hpp"
#include "magneto/exact_sme.hpp"
#include "magneto/io.hpp"
#include "magneto/runner.hpp"
#include "magneto/time_grid.hpp"
#include "magneto/wigner.hpp"
