#pragma once

// Umbrella header: the whole engine.
#include "fjrw/bmodel.hpp"
#include "fjrw/chamber.hpp"
#include "fjrw/coefficient.hpp"
#include "fjrw/combinatorics.hpp"
#include "fjrw/invariants.hpp"
#include "fjrw/json_io.hpp"
#include "fjrw/markings.hpp"
#include "fjrw/monomials.hpp"
#include "fjrw/rational.hpp"
#include "fjrw/series.hpp"
#include "fjrw/verification.hpp"
#include "fjrw/wallcross.hpp"
