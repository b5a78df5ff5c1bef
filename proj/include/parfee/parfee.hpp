#pragma once

#include "parfee/competition.hpp"
#include "parfee/csv.hpp"
#include "parfee/curve.hpp"
#include "parfee/errors.hpp"
#include "parfee/model.hpp"
#include "parfee/numerics.hpp"
#include "parfee/scenario.hpp"
#include "parfee/tables.hpp"
#include "parfee/verify.hpp"
